"""SPICE-like netlist grammar: parser, serializer, flattening, validation.

Grammar (title line first, case-insensitive keywords, engineering
suffixes f/p/n/u/m/k/meg/g, '+' continuation lines, '*' full-line and
';' trailing comments):

    R<name> n+ n- <value>
    C<name> n+ n- <value> [ic=<v0>]
    V<name> n+ n- DC <value> | PWL( t1 v1 t2 v2 ... )
    Y<name> n+ n- <modelname> [x0=<val>] [polarity=1|-1]
    M<name> nd ng ns nb <modelname>
    X<name> <ports...> <subcktname>
    .model <name> memristor|nmos|pmos <key>=<val> ...
    .subckt <name> <ports...> / .ends
    .tran <tstep> <tstop>
    .end

Ground is spelled ``0`` or ``gnd``. Memristor terminal order is
(plus, minus) with plus = the bar side; ``polarity=-1`` flips it.
"""

import re
from dataclasses import dataclass, field

GROUND_NAMES = ("0", "gnd")

TERMINAL_ARITY = {"R": 2, "C": 2, "V": 2, "Y": 2, "M": 4}

MODEL_TYPES = ("memristor", "nmos", "pmos")

MEMRISTOR_MODEL_DEFAULTS = {
    "r_on": 1e3,
    "r_off": 1e6,
    "l_disc": 4e-9,
    "l_taox": 11e-9,
    "area": 3.14e-14,
    "n_min": 4e25,
    "n_max": 2e27,
    "z_v0": 2.0,
    "c31": 6e-12,
    "v_char": 0.25,
    "window_exponent": 1.0,
    "resistance_linear": 0.0,
}

MOSFET_MODEL_DEFAULTS = {
    "v_th": 0.3,
    "r_ds_on": 100.0,
    "r_ds_off": 1e9,
}


class NetlistError(Exception):
    """Parse/structure error carrying the offending source line."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


_NUMBER_RE = re.compile(
    r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(meg|f|p|n|u|m|k|g)?$",
    re.IGNORECASE,
)

_SUFFIX = {
    "f": 1e-15,
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "m": 1e-3,
    "k": 1e3,
    "meg": 1e6,
    "g": 1e9,
}


def parse_number(token, line=None):
    m = _NUMBER_RE.match(token)
    if not m:
        raise NetlistError(f"malformed number {token!r}", line)
    value = float(m.group(1))
    suffix = m.group(2)
    if suffix:
        value *= _SUFFIX[suffix.lower()]
    return value


def format_number(value):
    return repr(float(value))


@dataclass
class Device:
    kind: str  # one of R C V Y M
    name: str
    terminals: list  # ordered net names
    params: dict = field(default_factory=dict)
    model: str = None
    initial_state: float = None  # memristor x0


@dataclass
class Instance:
    name: str
    ports: list
    subckt: str


@dataclass
class Analysis:
    kind: str  # "tran"
    tstep: float
    tstop: float


@dataclass
class SubcktDef:
    name: str
    ports: list
    body: "Circuit"


@dataclass
class Circuit:
    title: str = ""
    devices: list = field(default_factory=list)
    instances: list = field(default_factory=list)
    subckt_defs: dict = field(default_factory=dict)
    models: dict = field(default_factory=dict)  # name -> (type, params)
    analyses: list = field(default_factory=list)


@dataclass
class FlatDevice:
    kind: str
    name: str
    terminals: list  # net indices
    params: dict
    initial_state: float = None


@dataclass
class FlatCircuit:
    nets: list  # index 0 is ground
    devices: list
    analyses: list = field(default_factory=list)


@dataclass
class Diagnostic:
    severity: str  # "error" or "warning"
    message: str
    nets: list = field(default_factory=list)

    def __str__(self):
        tail = f" [{', '.join(self.nets)}]" if self.nets else ""
        return f"{self.severity}: {self.message}{tail}"


def _logical_lines(text):
    """Merge '+' continuations, strip comments; yields (lineno, tokens)."""
    merged = []  # (first lineno, text)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";", 1)[0].rstrip()
        stripped = line.strip()
        if lineno == 1:
            merged.append((lineno, line))  # title, kept verbatim
            continue
        if not stripped or stripped.startswith("*"):
            continue
        if stripped.startswith("+"):
            if not merged or merged[-1][0] == 1:
                raise NetlistError("continuation with nothing to continue", lineno)
            first, prev = merged[-1]
            merged[-1] = (first, prev + " " + stripped[1:])
        else:
            merged.append((lineno, stripped))
    return merged


def _tokenize(line_text):
    spaced = line_text.replace("(", " ( ").replace(")", " ) ").replace("=", " = ")
    return spaced.split()


def _split_kv(tokens, lineno):
    """Split trailing tokens into positional tokens and key=value pairs."""
    positional = []
    kv = {}
    i = 0
    while i < len(tokens):
        if i + 1 < len(tokens) and tokens[i + 1] == "=":
            if i + 2 >= len(tokens):
                raise NetlistError(f"missing value for {tokens[i]!r}", lineno)
            kv[tokens[i].lower()] = tokens[i + 2]
            i += 3
        else:
            if kv:
                raise NetlistError(
                    f"positional token {tokens[i]!r} after key=value", lineno
                )
            positional.append(tokens[i])
            i += 1
    return positional, kv


def _parse_device(tokens, lineno):
    card = tokens[0]
    kind = card[0].upper()
    if kind not in TERMINAL_ARITY:
        raise NetlistError(f"unknown device prefix {card[0]!r}", lineno)
    name = card
    arity = TERMINAL_ARITY[kind]
    rest = tokens[1:]
    if kind == "V":
        return _parse_vsource(name, rest, lineno)
    positional, kv = _split_kv(rest, lineno)
    if kind == "R":
        if len(positional) != 3:
            raise NetlistError(
                f"resistor {name} needs 2 terminals and a value", lineno
            )
        value = parse_number(positional[2], lineno)
        return Device("R", name, positional[:2], {"value": value})
    if kind == "C":
        if len(positional) != 3:
            raise NetlistError(
                f"capacitor {name} needs 2 terminals and a value", lineno
            )
        params = {"value": parse_number(positional[2], lineno)}
        if "ic" in kv:
            params["ic"] = parse_number(kv.pop("ic"), lineno)
        if kv:
            raise NetlistError(f"unknown parameter(s) {sorted(kv)}", lineno)
        return Device("C", name, positional[:2], params)
    if kind == "Y":
        if len(positional) != 3:
            raise NetlistError(
                f"memristor {name} needs 2 terminals and a model name", lineno
            )
        x0 = None
        params = {}
        if "x0" in kv:
            x0 = parse_number(kv.pop("x0"), lineno)
            if not 0.0 <= x0 <= 1.0:
                raise NetlistError(f"x0 out of [0,1] on {name}", lineno)
        if "polarity" in kv:
            pol = parse_number(kv.pop("polarity"), lineno)
            if pol not in (1.0, -1.0):
                raise NetlistError(f"polarity must be 1 or -1 on {name}", lineno)
            params["polarity"] = pol
        if kv:
            raise NetlistError(f"unknown parameter(s) {sorted(kv)}", lineno)
        return Device(
            "Y", name, positional[:2], params, model=positional[2], initial_state=x0
        )
    # kind == "M"
    if len(positional) != 5:
        raise NetlistError(f"mosfet {name} needs 4 terminals and a model name", lineno)
    if kv:
        raise NetlistError(f"unknown parameter(s) {sorted(kv)}", lineno)
    return Device("M", name, positional[:4], {}, model=positional[4])


def _parse_vsource(name, rest, lineno):
    if len(rest) < 3:
        raise NetlistError(f"source {name} needs 2 terminals and a spec", lineno)
    terminals = rest[:2]
    spec = rest[2].lower()
    if spec == "dc":
        if len(rest) != 4:
            raise NetlistError(f"source {name}: DC takes one value", lineno)
        return Device("V", name, terminals, {"dc": parse_number(rest[3], lineno)})
    if spec == "pwl":
        pts = [t for t in rest[3:] if t not in ("(", ")")]
        if len(pts) < 2 or len(pts) % 2 != 0:
            raise NetlistError(f"source {name}: PWL needs t/v pairs", lineno)
        times = [parse_number(p, lineno) for p in pts[0::2]]
        vals = [parse_number(p, lineno) for p in pts[1::2]]
        for a, b in zip(times, times[1:]):
            if b <= a:
                raise NetlistError(
                    f"source {name}: PWL times must increase", lineno
                )
        return Device("V", name, terminals, {"pwl_t": times, "pwl_v": vals})
    raise NetlistError(f"source {name}: expected DC or PWL, got {rest[2]!r}", lineno)


def parse(text: str) -> Circuit:
    """Parse netlist source into a hierarchical Circuit."""
    lines = _logical_lines(text)
    if not lines:
        raise NetlistError("empty netlist", 1)
    circuit = Circuit(title=lines[0][1])
    scope_stack = [circuit]
    sub_stack = []
    for lineno, line_text in lines[1:]:
        tokens = _tokenize(line_text)
        head = tokens[0].lower()
        scope = scope_stack[-1]
        if head.startswith("."):
            if head == ".end":
                break
            if head == ".ends":
                if not sub_stack:
                    raise NetlistError(".ends without .subckt", lineno)
                done = sub_stack.pop()
                scope_stack.pop()
                parent = scope_stack[-1]
                if done.name in parent.subckt_defs:
                    raise NetlistError(f"duplicate subckt {done.name!r}", lineno)
                parent.subckt_defs[done.name] = done
                continue
            if head == ".subckt":
                if len(tokens) < 3:
                    raise NetlistError(".subckt needs a name and ports", lineno)
                sub = SubcktDef(tokens[1], tokens[2:], Circuit(title=tokens[1]))
                sub_stack.append(sub)
                scope_stack.append(sub.body)
                continue
            if head == ".model":
                if len(tokens) < 3:
                    raise NetlistError(".model needs a name and a type", lineno)
                mname, mtype = tokens[1], tokens[2].lower()
                if mtype not in MODEL_TYPES:
                    raise NetlistError(f"unknown model type {tokens[2]!r}", lineno)
                _, kv = _split_kv(tokens[3:], lineno)
                params = {k: parse_number(v, lineno) for k, v in kv.items()}
                if mname in scope.models:
                    raise NetlistError(f"duplicate model {mname!r}", lineno)
                scope.models[mname] = (mtype, params)
                continue
            if head == ".tran":
                if len(tokens) != 3:
                    raise NetlistError(".tran needs tstep and tstop", lineno)
                tstep = parse_number(tokens[1], lineno)
                tstop = parse_number(tokens[2], lineno)
                if not 0 < tstep <= tstop:
                    raise NetlistError(".tran requires 0 < tstep <= tstop", lineno)
                scope.analyses.append(Analysis("tran", tstep, tstop))
                continue
            raise NetlistError(f"unknown directive {tokens[0]!r}", lineno)
        if head.startswith("x"):
            if len(tokens) < 3:
                raise NetlistError("instance needs ports and a subckt name", lineno)
            inst = Instance(tokens[0], tokens[1:-1], tokens[-1])
            _check_unique(scope, inst.name, lineno)
            scope.instances.append(inst)
            continue
        device = _parse_device(tokens, lineno)
        _check_unique(scope, device.name, lineno)
        scope.devices.append(device)
    if sub_stack:
        raise NetlistError(f"unterminated .subckt {sub_stack[-1].name!r}")
    return circuit


def _check_unique(scope, name, lineno):
    lowered = name.lower()
    for d in scope.devices:
        if d.name.lower() == lowered:
            raise NetlistError(f"duplicate name {name!r}", lineno)
    for i in scope.instances:
        if i.name.lower() == lowered:
            raise NetlistError(f"duplicate name {name!r}", lineno)


def serialize(circuit: Circuit) -> str:
    """Render a Circuit back to netlist text (parse/serialize fixpoint)."""
    out = [circuit.title if circuit.title else "* untitled"]
    _serialize_body(circuit, out)
    out.append(".end")
    return "\n".join(out) + "\n"


def _serialize_body(circuit, out):
    for name, (mtype, params) in circuit.models.items():
        kv = " ".join(f"{k}={format_number(v)}" for k, v in params.items())
        out.append(f".model {name} {mtype} {kv}".rstrip())
    for sub in circuit.subckt_defs.values():
        out.append(f".subckt {sub.name} {' '.join(sub.ports)}")
        _serialize_body(sub.body, out)
        out.append(".ends")
    for d in circuit.devices:
        out.append(_serialize_device(d))
    for inst in circuit.instances:
        out.append(f"{inst.name} {' '.join(inst.ports)} {inst.subckt}")
    for an in circuit.analyses:
        out.append(f".tran {format_number(an.tstep)} {format_number(an.tstop)}")


def _serialize_device(d):
    terms = " ".join(d.terminals)
    if d.kind == "R":
        return f"{d.name} {terms} {format_number(d.params['value'])}"
    if d.kind == "C":
        card = f"{d.name} {terms} {format_number(d.params['value'])}"
        if "ic" in d.params:
            card += f" ic={format_number(d.params['ic'])}"
        return card
    if d.kind == "V":
        if "dc" in d.params:
            return f"{d.name} {terms} DC {format_number(d.params['dc'])}"
        pts = " ".join(
            f"{format_number(t)} {format_number(v)}"
            for t, v in zip(d.params["pwl_t"], d.params["pwl_v"])
        )
        return f"{d.name} {terms} PWL( {pts} )"
    if d.kind == "Y":
        card = f"{d.name} {terms} {d.model}"
        if d.initial_state is not None:
            card += f" x0={format_number(d.initial_state)}"
        if "polarity" in d.params:
            card += f" polarity={int(d.params['polarity'])}"
        return card
    return f"{d.name} {terms} {d.model}"  # M


def _is_ground(net):
    return net.lower() in GROUND_NAMES


def _check_recursion(circuit):
    defs = circuit.subckt_defs

    def visit(name, stack):
        if name in stack:
            raise NetlistError(f"recursive subcircuit {name!r}")
        sub = defs.get(name)
        if sub is None:
            raise NetlistError(f"undefined subcircuit {name!r}")
        for inst in sub.body.instances:
            visit(inst.subckt, stack + [name])

    for inst in circuit.instances:
        visit(inst.subckt, [])


def expand(circuit: Circuit) -> FlatCircuit:
    """Inline all subcircuit instances into a flat, simulation-ready circuit.

    Device and internal net names get a dot-separated instance path prefix;
    ground merges across scopes. Net numbering is deterministic: ground is
    net 0, the rest in first-encounter order (devices before instances in
    each scope).
    """
    _check_recursion(circuit)
    nets = ["0"]
    net_index = {"0": 0}
    devices = []

    def net_id(name):
        if _is_ground(name):
            return 0
        idx = net_index.get(name)
        if idx is None:
            idx = len(nets)
            net_index[name] = idx
            nets.append(name)
        return idx

    def resolve_model(name, device):
        entry = circuit.models.get(name)
        if entry is None:
            raise NetlistError(f"undefined model {name!r} on device {device}")
        return entry

    def emit(scope, prefix, binding):
        for d in scope.devices:
            terms = [net_id(binding(n)) for n in d.terminals]
            name = prefix + d.name
            params = dict(d.params)
            if d.kind == "Y":
                mtype, mparams = resolve_model(d.model, name)
                if mtype != "memristor":
                    raise NetlistError(
                        f"device {name} expects a memristor model, got {mtype}"
                    )
                full = dict(MEMRISTOR_MODEL_DEFAULTS)
                full.update(mparams)
                full["polarity"] = params.get("polarity", 1.0)
                devices.append(FlatDevice("Y", name, terms, full, d.initial_state))
            elif d.kind == "M":
                mtype, mparams = resolve_model(d.model, name)
                if mtype not in ("nmos", "pmos"):
                    raise NetlistError(
                        f"device {name} expects an nmos/pmos model, got {mtype}"
                    )
                full = dict(MOSFET_MODEL_DEFAULTS)
                full.update(mparams)
                full["polarity"] = 1.0 if mtype == "nmos" else -1.0
                devices.append(FlatDevice("M", name, terms, full))
            else:
                devices.append(FlatDevice(d.kind, name, terms, params))
        for inst in scope.instances:
            sub = circuit.subckt_defs.get(inst.subckt)
            if sub is None:
                raise NetlistError(f"undefined subcircuit {inst.subckt!r}")
            if len(inst.ports) != len(sub.ports):
                raise NetlistError(
                    f"instance {prefix + inst.name}: {len(inst.ports)} ports bound, "
                    f"subckt {sub.name!r} has {len(sub.ports)}"
                )
            outer = {p.lower(): binding(n) for p, n in zip(sub.ports, inst.ports)}
            inner_prefix = prefix + inst.name + "."

            def bind(n, outer=outer, inner_prefix=inner_prefix):
                if _is_ground(n):
                    return "0"
                mapped = outer.get(n.lower())
                if mapped is not None:
                    return mapped
                return inner_prefix + n

            emit(sub.body, inner_prefix, bind)

    emit(circuit, "", lambda n: "0" if _is_ground(n) else n)
    return FlatCircuit(nets, devices, list(circuit.analyses))


CONDUCTIVE_KINDS = ("R", "Y", "V")  # plus MOSFET d-s below


def _dc_components(flat):
    """Union-find over DC-conductive edges (R, Y, V, MOSFET drain-source)."""
    parent = list(range(len(flat.nets)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for d in flat.devices:
        if d.kind in CONDUCTIVE_KINDS:
            union(d.terminals[0], d.terminals[1])
        elif d.kind == "M":
            union(d.terminals[0], d.terminals[2])
    return find


def validate(flat: FlatCircuit) -> list:
    """Structural diagnostics: floating nets, missing DC paths, default x0."""
    diags = []
    touch = [0] * len(flat.nets)
    for d in flat.devices:
        for t in d.terminals:
            touch[t] += 1
    source_nets = set()
    for d in flat.devices:
        if d.kind == "V":
            source_nets.update(d.terminals)
    for idx, count in enumerate(touch):
        if idx == 0:
            continue
        if count == 0:
            diags.append(
                Diagnostic("warning", "net is unconnected", [flat.nets[idx]])
            )
        elif count == 1 and idx not in source_nets:
            diags.append(
                Diagnostic("warning", "floating net (single terminal)", [flat.nets[idx]])
            )
    find = _dc_components(flat)
    ground_root = find(0)
    stranded = [
        flat.nets[i]
        for i in range(1, len(flat.nets))
        if touch[i] > 0 and find(i) != ground_root
    ]
    if stranded:
        diags.append(Diagnostic("warning", "no DC path to ground", stranded))
    for d in flat.devices:
        if d.kind == "Y" and d.initial_state is None:
            diags.append(
                Diagnostic(
                    "warning",
                    f"memristor {d.name} has no x0; defaulting to 0.5",
                )
            )
    return diags


def no_dc_path_nets(flat: FlatCircuit) -> list:
    """Net names with no conductive path to ground (would make solve singular)."""
    touch = [0] * len(flat.nets)
    for d in flat.devices:
        for t in d.terminals:
            touch[t] += 1
    parent = list(range(len(flat.nets)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    # capacitors count here: their companion conductance keeps the transient
    # matrix nonsingular even without a DC path
    for d in flat.devices:
        if d.kind in ("R", "C", "Y", "V"):
            union(d.terminals[0], d.terminals[1])
        elif d.kind == "M":
            union(d.terminals[0], d.terminals[2])
    ground_root = find(0)
    return [
        flat.nets[i]
        for i in range(1, len(flat.nets))
        if touch[i] == 0 or find(i) != ground_root
    ]
