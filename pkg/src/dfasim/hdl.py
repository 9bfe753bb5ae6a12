"""Structural VHDL netlist emission.

The output file is a static component library (three behavioral operator
shells sharing the four-state controller) followed by one purely structural
entity for the graph: a signal bundle (data, strobe, acknowledge) per arc
and one component instantiation per node, everything in deterministic
order (nodes in statement order, signals in first-mention order).

Shell assignment follows the three operator architectures: two-input
one-output (primitives, deciders, logic ops and the uncontrolled merge),
three-input one-output (controlled merge), and two-input two-output
(branch).  The one-input kinds borrow the nearest shell with the unused
input tied off, and the copier borrows the two-output shell with its pair
of outputs on t/f.

The text is a generation target, not a verified design: it is pinned by
golden files and pattern checks, never compiled here.
"""

from __future__ import annotations

from .graph_ir import DataflowGraph, OpKind, in_slots, out_slots, validate_graph

_SHELL_2I1O = "df_op2x1"
_SHELL_3I1O = "df_op3x1"
_SHELL_2I2O = "df_op2x2"

#: kind -> (shell entity, {node slot: shell port}) ; unmapped shell inputs
#: are tied off, unmapped shell outputs are left open
_SHELL_FOR: dict[OpKind, tuple[str, dict[str, str]]] = {
    OpKind.COPY: (_SHELL_2I2O, {"a": "a", "z1": "t", "z2": "f"}),
    OpKind.NOT: (_SHELL_2I1O, {"a": "a", "z": "z"}),
    OpKind.DMERGE: (_SHELL_3I1O, {"a": "a", "b": "b", "ctl": "ctl", "z": "z"}),
    OpKind.NDMERGE: (_SHELL_2I1O, {"a": "a", "b": "b", "z": "z"}),
    OpKind.BRANCH: (_SHELL_2I2O, {"a": "a", "ctl": "b", "t": "t", "f": "f"}),
}
for _k in OpKind:
    _SHELL_FOR.setdefault(_k, (_SHELL_2I1O, {"a": "a", "b": "b", "z": "z"}))

_SHELL_INPUTS = {
    _SHELL_2I1O: ("a", "b"),
    _SHELL_3I1O: ("a", "b", "ctl"),
    _SHELL_2I2O: ("a", "b"),
}
_SHELL_OUTPUTS = {
    _SHELL_2I1O: ("z",),
    _SHELL_3I1O: ("z",),
    _SHELL_2I2O: ("t", "f"),
}

_PREAMBLE = """\
-- Operator component library.  Each shell runs the four-state controller:
-- S0 reset, S1 latch inputs (ack high while a latch is occupied), S2 compute
-- and strobe the result out once the consumer is ready, S3 return the
-- handshake wires to zero.  KIND selects the function and which ports the
-- controller actually waits on.

library ieee;
use ieee.std_logic_1164.all;
use ieee.numeric_std.all;

package df_ops is
  function df_alu(kind : string; a : std_logic_vector; b : std_logic_vector)
    return std_logic_vector;
end package;

package body df_ops is
  function df_alu(kind : string; a : std_logic_vector; b : std_logic_vector)
    return std_logic_vector is
    variable sa : signed(a'range) := signed(a);
    variable sb : signed(b'range) := signed(b);
    variable r  : signed(a'range) := (others => '0');
    variable f  : boolean := false;
  begin
    if    kind = "add" then r := sa + sb;
    elsif kind = "sub" then r := sa - sb;
    elsif kind = "mul" then r := resize(sa * sb, r'length);
    elsif kind = "div" then
      if sb = 0 then r := (others => '0'); else r := sa / sb; end if;
    elsif kind = "and" then r := sa and sb;
    elsif kind = "or"  then r := sa or sb;
    elsif kind = "not" then r := not sa;
    elsif kind = "ifgt" then f := sa > sb;
    elsif kind = "ifge" then f := sa >= sb;
    elsif kind = "iflt" then f := sa < sb;
    elsif kind = "ifle" then f := sa <= sb;
    elsif kind = "ifeq" then f := sa = sb;
    elsif kind = "ifdf" then f := sa /= sb;
    end if;
    if kind(kind'left) = 'i' and f then
      r := to_signed(1, r'length);
    end if;
    return std_logic_vector(r);
  end function;
end package body;

library ieee;
use ieee.std_logic_1164.all;
use ieee.numeric_std.all;
use work.df_ops.all;

entity df_op2x1 is
  generic (KIND : string := "add"; WIDTH : natural := 16);
  port (
    clk    : in  std_logic;
    rst    : in  std_logic;
    a_data : in  std_logic_vector(WIDTH - 1 downto 0);
    a_str  : in  std_logic;
    a_ack  : out std_logic;
    b_data : in  std_logic_vector(WIDTH - 1 downto 0);
    b_str  : in  std_logic;
    b_ack  : out std_logic;
    z_data : out std_logic_vector(WIDTH - 1 downto 0);
    z_str  : out std_logic;
    z_ack  : in  std_logic
  );
end entity;

architecture behavioral of df_op2x1 is
  type state_t is (S0, S1, S2, S3);
  signal state : state_t := S0;
  signal dadoa, dadob : std_logic_vector(WIDTH - 1 downto 0) := (others => '0');
  signal bita, bitb : std_logic := '0';
  -- "not" waits on port a only; "ndmerge" fires on either input
  constant UNARY : boolean := KIND = "not";
  constant MERGE : boolean := KIND = "ndmerge";
begin
  process (clk)
    variable pick_a : boolean;
  begin
    if rising_edge(clk) then
      if rst = '1' then
        state <= S0;
      else
        case state is
          when S0 =>
            a_ack <= '0'; b_ack <= '0'; z_str <= '0';
            bita <= '0'; bitb <= '0';
            state <= S1;
          when S1 =>
            if bita = '0' and a_str = '1' then
              dadoa <= a_data; bita <= '1'; a_ack <= '1';
            end if;
            if not UNARY and bitb = '0' and b_str = '1' then
              dadob <= b_data; bitb <= '1'; b_ack <= '1';
            end if;
            if (MERGE and (bita = '1' or bitb = '1'))
              or (UNARY and bita = '1')
              or (not MERGE and not UNARY and bita = '1' and bitb = '1') then
              state <= S2;
            end if;
            if bita = '0' and a_str = '0' then a_ack <= '0'; end if;
            if bitb = '0' and b_str = '0' then b_ack <= '0'; end if;
          when S2 =>
            if z_ack = '0' then
              if MERGE then
                pick_a := bita = '1';
                if pick_a then
                  z_data <= dadoa; bita <= '0';
                else
                  z_data <= dadob; bitb <= '0';
                end if;
              else
                z_data <= df_alu(KIND, dadoa, dadob);
                bita <= '0'; bitb <= '0';
              end if;
              z_str <= '1';
              state <= S3;
            end if;
          when S3 =>
            if z_ack = '1' then
              z_str <= '0';
              state <= S1;
            end if;
            if bita = '0' and a_str = '0' then a_ack <= '0'; end if;
            if bitb = '0' and b_str = '0' then b_ack <= '0'; end if;
        end case;
      end if;
    end if;
  end process;
end architecture;

library ieee;
use ieee.std_logic_1164.all;
use ieee.numeric_std.all;

entity df_op3x1 is
  generic (KIND : string := "dmerge"; WIDTH : natural := 16);
  port (
    clk      : in  std_logic;
    rst      : in  std_logic;
    a_data   : in  std_logic_vector(WIDTH - 1 downto 0);
    a_str    : in  std_logic;
    a_ack    : out std_logic;
    b_data   : in  std_logic_vector(WIDTH - 1 downto 0);
    b_str    : in  std_logic;
    b_ack    : out std_logic;
    ctl_data : in  std_logic_vector(WIDTH - 1 downto 0);
    ctl_str  : in  std_logic;
    ctl_ack  : out std_logic;
    z_data   : out std_logic_vector(WIDTH - 1 downto 0);
    z_str    : out std_logic;
    z_ack    : in  std_logic
  );
end entity;

architecture behavioral of df_op3x1 is
  type state_t is (S0, S1, S2, S3);
  signal state : state_t := S0;
  signal dadoa, dadob, dadoc : std_logic_vector(WIDTH - 1 downto 0) := (others => '0');
  signal bita, bitb, bitc : std_logic := '0';
begin
  process (clk)
  begin
    if rising_edge(clk) then
      if rst = '1' then
        state <= S0;
      else
        case state is
          when S0 =>
            a_ack <= '0'; b_ack <= '0'; ctl_ack <= '0'; z_str <= '0';
            bita <= '0'; bitb <= '0'; bitc <= '0';
            state <= S1;
          when S1 =>
            if bita = '0' and a_str = '1' then
              dadoa <= a_data; bita <= '1'; a_ack <= '1';
            end if;
            if bitb = '0' and b_str = '1' then
              dadob <= b_data; bitb <= '1'; b_ack <= '1';
            end if;
            if bitc = '0' and ctl_str = '1' then
              dadoc <= ctl_data; bitc <= '1'; ctl_ack <= '1';
            end if;
            if bita = '1' and bitb = '1' and bitc = '1' then
              state <= S2;
            end if;
            if bita = '0' and a_str = '0' then a_ack <= '0'; end if;
            if bitb = '0' and b_str = '0' then b_ack <= '0'; end if;
            if bitc = '0' and ctl_str = '0' then ctl_ack <= '0'; end if;
          when S2 =>
            if z_ack = '0' then
              if signed(dadoc) /= 0 then
                z_data <= dadoa;
              else
                z_data <= dadob;
              end if;
              bita <= '0'; bitb <= '0'; bitc <= '0';
              z_str <= '1';
              state <= S3;
            end if;
          when S3 =>
            if z_ack = '1' then
              z_str <= '0';
              state <= S1;
            end if;
            if bita = '0' and a_str = '0' then a_ack <= '0'; end if;
            if bitb = '0' and b_str = '0' then b_ack <= '0'; end if;
            if bitc = '0' and ctl_str = '0' then ctl_ack <= '0'; end if;
        end case;
      end if;
    end if;
  end process;
end architecture;

library ieee;
use ieee.std_logic_1164.all;
use ieee.numeric_std.all;

entity df_op2x2 is
  generic (KIND : string := "branch"; WIDTH : natural := 16);
  port (
    clk    : in  std_logic;
    rst    : in  std_logic;
    a_data : in  std_logic_vector(WIDTH - 1 downto 0);
    a_str  : in  std_logic;
    a_ack  : out std_logic;
    b_data : in  std_logic_vector(WIDTH - 1 downto 0);
    b_str  : in  std_logic;
    b_ack  : out std_logic;
    t_data : out std_logic_vector(WIDTH - 1 downto 0);
    t_str  : out std_logic;
    t_ack  : in  std_logic;
    f_data : out std_logic_vector(WIDTH - 1 downto 0);
    f_str  : out std_logic;
    f_ack  : in  std_logic
  );
end entity;

architecture behavioral of df_op2x2 is
  type state_t is (S0, S1, S2, S3);
  signal state : state_t := S0;
  signal dadoa, dadob : std_logic_vector(WIDTH - 1 downto 0) := (others => '0');
  signal bita, bitb : std_logic := '0';
  signal sent_t, sent_f : std_logic := '0';
  -- "copy" uses port a only and drives both outputs; "branch" picks one
  constant IS_COPY : boolean := KIND = "copy";
begin
  process (clk)
  begin
    if rising_edge(clk) then
      if rst = '1' then
        state <= S0;
      else
        case state is
          when S0 =>
            a_ack <= '0'; b_ack <= '0'; t_str <= '0'; f_str <= '0';
            bita <= '0'; bitb <= '0'; sent_t <= '0'; sent_f <= '0';
            state <= S1;
          when S1 =>
            if bita = '0' and a_str = '1' then
              dadoa <= a_data; bita <= '1'; a_ack <= '1';
            end if;
            if not IS_COPY and bitb = '0' and b_str = '1' then
              dadob <= b_data; bitb <= '1'; b_ack <= '1';
            end if;
            if (IS_COPY and bita = '1')
              or (not IS_COPY and bita = '1' and bitb = '1') then
              state <= S2;
            end if;
            if bita = '0' and a_str = '0' then a_ack <= '0'; end if;
            if bitb = '0' and b_str = '0' then b_ack <= '0'; end if;
          when S2 =>
            if IS_COPY then
              if sent_t = '0' and t_ack = '0' then
                t_data <= dadoa; t_str <= '1'; sent_t <= '1';
              end if;
              if sent_f = '0' and f_ack = '0' then
                f_data <= dadoa; f_str <= '1'; sent_f <= '1';
              end if;
              if sent_t = '1' and sent_f = '1' then
                bita <= '0';
                state <= S3;
              end if;
            else
              if signed(dadob) /= 0 then
                if t_ack = '0' then
                  t_data <= dadoa; t_str <= '1'; sent_t <= '1';
                  bita <= '0'; bitb <= '0';
                  state <= S3;
                end if;
              else
                if f_ack = '0' then
                  f_data <= dadoa; f_str <= '1'; sent_f <= '1';
                  bita <= '0'; bitb <= '0';
                  state <= S3;
                end if;
              end if;
            end if;
          when S3 =>
            if sent_t = '1' and t_ack = '1' then
              t_str <= '0'; sent_t <= '0';
            end if;
            if sent_f = '1' and f_ack = '1' then
              f_str <= '0'; sent_f <= '0';
            end if;
            if (sent_t = '0' or t_ack = '1') and (sent_f = '0' or f_ack = '1') then
              state <= S1;
            end if;
            if bita = '0' and a_str = '0' then a_ack <= '0'; end if;
            if bitb = '0' and b_str = '0' then b_ack <= '0'; end if;
        end case;
      end if;
    end if;
  end process;
end architecture;
"""


def emit_netlist(graph: DataflowGraph, width: int = 16, name: str = "dataflow_top") -> str:
    """Render a validated graph as one structural VHDL file.

    Emission is total and deterministic: the same graph, width and name
    always produce byte-identical text.  Raises ``ValueError`` for graphs
    that fail validation.
    """
    report = validate_graph(graph)
    if not report.ok:
        raise ValueError(f"cannot emit netlist, graph failed validation:\n{report}")

    internal = [a for a in graph.arcs if a not in graph.inputs and a not in graph.outputs]
    vec = f"std_logic_vector({width} - 1 downto 0)"

    lines: list[str] = [_PREAMBLE]
    lines.append("library ieee;")
    lines.append("use ieee.std_logic_1164.all;")
    lines.append("")
    lines.append(f"entity {name} is")
    lines.append("  port (")
    port_lines = ["    clk : in  std_logic", "    rst : in  std_logic"]
    for label in graph.inputs:
        port_lines.append(f"    {label}_data : in  {vec}")
        port_lines.append(f"    {label}_str  : in  std_logic")
        port_lines.append(f"    {label}_ack  : out std_logic")
    for label in graph.outputs:
        port_lines.append(f"    {label}_data : out {vec}")
        port_lines.append(f"    {label}_str  : out std_logic")
        port_lines.append(f"    {label}_ack  : in  std_logic")
    lines.append(";\n".join(port_lines))
    lines.append("  );")
    lines.append("end entity;")
    lines.append("")
    lines.append(f"architecture structural of {name} is")
    for label in internal:
        lines.append(f"  signal {label}_data : {vec};")
        lines.append(f"  signal {label}_str  : std_logic;")
        lines.append(f"  signal {label}_ack  : std_logic;")
    lines.append("begin")

    for node in graph.nodes:
        shell, slot_map = _SHELL_FOR[node.kind]
        wired: dict[str, str] = {}
        for slot, label in zip(in_slots(node.kind), node.inputs):
            wired[slot_map[slot]] = label
        for slot, label in zip(out_slots(node.kind), node.outputs):
            wired[slot_map[slot]] = label
        mapping = ["clk => clk", "rst => rst"]
        for port in _SHELL_INPUTS[shell]:
            label = wired.get(port)
            if label is None:
                mapping.append(f"{port}_data => (others => '0')")
                mapping.append(f"{port}_str => '0'")
                mapping.append(f"{port}_ack => open")
            else:
                mapping.append(f"{port}_data => {label}_data")
                mapping.append(f"{port}_str => {label}_str")
                mapping.append(f"{port}_ack => {label}_ack")
        for port in _SHELL_OUTPUTS[shell]:
            label = wired.get(port)
            if label is None:
                mapping.append(f"{port}_data => open")
                mapping.append(f"{port}_str => open")
                mapping.append(f"{port}_ack => '1'")
            else:
                mapping.append(f"{port}_data => {label}_data")
                mapping.append(f"{port}_str => {label}_str")
                mapping.append(f"{port}_ack => {label}_ack")
        lines.append(f"  {node.name} : entity work.{shell}")
        lines.append(f'    generic map (KIND => "{node.kind.value}", WIDTH => {width})')
        lines.append("    port map (")
        lines.append(",\n".join(f"      {m}" for m in mapping))
        lines.append("    );")

    lines.append("end architecture;")
    return "\n".join(lines) + "\n"
