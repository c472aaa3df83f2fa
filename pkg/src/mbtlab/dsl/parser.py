"""Recursive-descent parser for models, value terms and patterns.

Identifiers are resolved after parsing: a bare name or application whose name
is a declared constructor becomes a constructor term, ``and``/``or``/``not``
calls become boolean operators, everything else stays a variable or call.
"""

from __future__ import annotations

from dataclasses import replace

from ..errors import ParseError
from ..model import syntax as S
from ..model.values import ABSENT, Con
from .lexer import SourceLocation, tokenize

_BOOL_BUILTINS = {"and": "&&", "or": "||"}
_TERMINATORS = {"';'", "'}'", "')'", "','"}


class _Parser:
    def __init__(self, text, filename):
        self.filename = filename
        self.toks = tokenize(text, filename)
        self.i = 0

    # -- token helpers ---------------------------------------------------

    @property
    def tok(self):
        return self.toks[self.i]

    def loc(self, tok=None):
        tok = tok or self.tok
        return SourceLocation(self.filename, tok.line, tok.col)

    def error(self, expected):
        tok = self.tok
        prev = self.toks[self.i - 1] if self.i > 0 else None
        if prev is not None and tok.line > prev.end_line and any(t in expected for t in _TERMINATORS):
            # a missing terminator is reported where it should have been
            where = SourceLocation(self.filename, prev.end_line, prev.end_col)
        else:
            where = self.loc(tok)
        raise ParseError(where, expected, tok.text)

    def at(self, text):
        t = self.tok
        return t.kind in ("sym", "kw") and t.text == text

    def at_id(self, text=None):
        t = self.tok
        return t.kind == "id" and (text is None or t.text == text)

    def accept(self, text):
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.at(text):
            self.error(repr(text))
        tok = self.tok
        self.i += 1
        return tok

    def ident(self, what="identifier"):
        if self.tok.kind != "id":
            self.error(what)
        tok = self.tok
        self.i += 1
        return tok.text

    def contextual(self, word):
        if not self.at_id(word):
            self.error(repr(word))
        self.i += 1

    def sep_list(self, item, closer):
        """Items separated by ';' up to `closer`, trailing ';' allowed."""
        out = []
        while not self.at(closer):
            out.append(item())
            if not self.accept(";"):
                break
        self.expect(closer)
        return out

    # -- top level -------------------------------------------------------

    def model(self):
        types, funcs, comps, observe = [], [], [], None
        while self.tok.kind != "eof":
            if self.at("type"):
                types.append(self.typedecl())
            elif self.at("fun"):
                funcs.append(self.fundecl())
            elif self.at("component") or self.at("concrete"):
                comps.append(self.component())
            elif self.at("observe"):
                if observe is not None:
                    self.error("a single observe block")
                observe = self.observe()
            else:
                self.error("'type', 'fun', 'component' or 'observe'")
        return S.Model(tuple(types), tuple(funcs), tuple(comps), observe)

    def typeref(self):
        return self.ident("type name")

    def typedecl(self):
        loc = self.loc()
        self.expect("type")
        name = self.ident("type name")
        self.expect("=")
        cons = [self.condecl()]
        while self.accept("|"):
            cons.append(self.condecl())
        return S.TypeDef(name, tuple(cons), loc=loc)

    def condecl(self):
        loc = self.loc()
        name = self.ident("constructor name")
        args = []
        if self.accept("("):
            args.append(self.typeref())
            while self.accept(","):
                args.append(self.typeref())
            self.expect(")")
        return S.Constructor(name, tuple(args), loc=loc)

    def fundecl(self):
        loc = self.loc()
        self.expect("fun")
        name = self.ident("function name")
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.param())
            while self.accept(","):
                params.append(self.param())
        self.expect(")")
        self.expect(":")
        result = self.typeref()
        self.expect("=")
        body = self.expr()
        return S.FuncDef(name, tuple(params), result, body, loc=loc)

    def param(self):
        name = self.ident("parameter name")
        self.expect(":")
        return (name, self.typeref())

    def component(self):
        loc = self.loc()
        tags = ("concrete",) if self.accept("concrete") else ()
        self.expect("component")
        name = self.ident("component name")
        self.expect("{")
        ports, subs, chans, efsm = [], [], [], None
        while not self.at("}"):
            if self.at("ports"):
                self.i += 1
                self.expect("{")
                ports += self.sep_list(self.portdecl, "}")
            elif self.at("sub"):
                self.i += 1
                self.expect("{")
                subs += self.sep_list(self.subdecl, "}")
            elif self.at("channels"):
                self.i += 1
                self.expect("{")
                chans += self.sep_list(self.chandecl, "}")
            elif self.at("efsm"):
                if efsm is not None:
                    self.error("a single efsm block")
                efsm = self.efsm()
            else:
                self.error("'ports', 'sub', 'channels', 'efsm' or '}'")
        self.expect("}")
        return S.Component(name, tuple(ports), tuple(subs), tuple(chans), efsm, tags, loc=loc)

    def portdecl(self):
        loc = self.loc()
        if self.at_id("in") or self.at_id("out"):
            direction = self.tok.text
            self.i += 1
        else:
            self.error("'in' or 'out'")
        name = self.ident("port name")
        self.expect(":")
        return S.Port(name, direction, self.typeref(), loc=loc)

    def subdecl(self):
        loc = self.loc()
        name = self.ident("instance name")
        self.expect(":")
        return S.SubInst(name, self.ident("component name"), loc=loc)

    def endpoint(self):
        first = self.ident("port")
        if self.accept("."):
            return S.Endpoint(first, self.ident("port"))
        return S.Endpoint(None, first)

    def chandecl(self):
        loc = self.loc()
        name = self.ident("channel name")
        self.expect(":")
        src = self.endpoint()
        self.expect("->")
        dst = self.endpoint()
        delayed = self.accept("delayed")
        return S.Channel(name, src, dst, delayed, loc=loc)

    def efsm(self):
        loc = self.loc()
        self.expect("efsm")
        self.expect("{")
        states, init, locals_, trans = None, None, [], []

        def item():
            nonlocal states, init
            if self.at("states"):
                self.i += 1
                names = [self.ident("state name")]
                while self.accept(","):
                    names.append(self.ident("state name"))
                states = (states or ()) + tuple(names)
            elif self.at("init"):
                self.i += 1
                init = self.ident("state name")
            elif self.at("local"):
                lloc = self.loc()
                self.i += 1
                name = self.ident("local name")
                self.expect(":")
                ty = self.typeref()
                self.expect("=")
                locals_.append(S.LocalDecl(name, ty, self.expr(), loc=lloc))
            elif self.at("trans"):
                trans.append(self.transition())
            else:
                self.error("'states', 'init', 'local', 'trans' or '}'")

        self.sep_list(item, "}")
        if states is None:
            raise ParseError(loc, "'states' declaration", "}")
        if init is None:
            raise ParseError(loc, "'init' declaration", "}")
        return S.Efsm(states, init, tuple(locals_), tuple(trans), loc=loc)

    def transition(self):
        loc = self.loc()
        self.expect("trans")
        src = self.ident("state name")
        self.expect("->")
        dst = self.ident("state name")
        inputs, guard, outputs, assigns = [], None, [], []
        if self.accept("when"):
            inputs.append(self.inpat())
            while self.accept(","):
                inputs.append(self.inpat())
        if self.accept("if"):
            guard = self.expr()
        if self.accept("then"):
            outputs.append(self.output())
            while self.accept(","):
                outputs.append(self.output())
        if self.accept("set"):
            assigns.append(self.assign())
            while self.accept(","):
                assigns.append(self.assign())
        return S.Transition(src, dst, tuple(inputs), guard, tuple(outputs), tuple(assigns), loc=loc)

    def inpat(self):
        port = self.ident("port name")
        self.expect("?")
        return (port, self.pattern())

    def output(self):
        port = self.ident("port name")
        self.expect("!")
        return (port, self.expr())

    def assign(self):
        name = self.ident("local name")
        self.expect(":=")
        return (name, self.expr())

    def observe(self):
        loc = self.loc()
        self.expect("observe")
        self.expect("{")
        self.contextual("query")
        qport = self.ident("port name")
        self.expect("!")
        query = self.expr()
        self.expect(";")
        self.contextual("next")
        nport = self.ident("port name")
        self.expect("!")
        nxt = self.expr()
        self.expect(";")
        self.contextual("response")
        resp = self.ident("port name")
        self.expect(";")
        self.contextual("registry")
        path = [self.ident("instance or local name")]
        while self.accept("."):
            path.append(self.ident("instance or local name"))
        self.expect(";")
        self.contextual("chunk")
        if self.tok.kind != "int":
            self.error("chunk size")
        chunk = int(self.tok.text)
        self.i += 1
        self.accept(";")
        self.expect("}")
        return S.Observe(qport, query, nport, nxt, resp, ".".join(path), chunk, loc=loc)

    # -- patterns ----------------------------------------------------------

    def pattern(self):
        tok = self.tok
        loc = self.loc()
        if self.accept("_"):
            return S.PWild(loc=loc)
        if self.accept("ε"):
            return S.PAbsent(loc=loc)
        if self.accept("true"):
            return S.PLit(True, loc=loc)
        if self.accept("false"):
            return S.PLit(False, loc=loc)
        if self.accept("-"):
            if self.tok.kind != "int":
                self.error("integer literal")
            v = -int(self.tok.text)
            self.i += 1
            return S.PLit(v, loc=loc)
        if tok.kind == "int":
            self.i += 1
            return S.PLit(int(tok.text), loc=loc)
        if tok.kind == "id":
            self.i += 1
            if self.accept("("):
                args = [self.pattern()]
                while self.accept(","):
                    args.append(self.pattern())
                self.expect(")")
                return S.PCon(tok.text, tuple(args), loc=loc)
            return S.PVar(tok.text, loc=loc)
        self.error("pattern")

    # -- expressions -------------------------------------------------------

    def expr(self):
        if self.at("if"):
            loc = self.loc()
            self.i += 1
            cond = self.expr()
            self.expect("then")
            then = self.expr()
            self.expect("else")
            return S.If(cond, then, self.expr(), loc=loc)
        if self.at("case"):
            loc = self.loc()
            self.i += 1
            scrut = self.expr()
            self.expect("of")
            self.expect("{")

            def arm():
                p = self.pattern()
                self.expect("->")
                return (p, self.expr())

            arms = self.sep_list(arm, "}")
            if not arms:
                self.error("case arm")
            return S.Case(scrut, tuple(arms), loc=loc)
        return self.or_expr()

    def _binary_level(self, ops, sub):
        left = sub()
        while self.tok.kind == "sym" and self.tok.text in ops:
            loc = self.loc()
            op = self.tok.text
            self.i += 1
            left = S.Binary(op, left, sub(), loc=loc)
        return left

    def or_expr(self):
        return self._binary_level(("||",), self.and_expr)

    def and_expr(self):
        return self._binary_level(("&&",), self.cmp_expr)

    def cmp_expr(self):
        left = self.add_expr()
        if self.tok.kind == "sym" and self.tok.text in S.COMPARE_OPS:
            loc = self.loc()
            op = self.tok.text
            self.i += 1
            left = S.Binary(op, left, self.add_expr(), loc=loc)
        return left

    def add_expr(self):
        return self._binary_level(("+", "-"), self.mul_expr)

    def mul_expr(self):
        return self._binary_level(("*", "/", "%"), self.unary_expr)

    def unary_expr(self):
        loc = self.loc()
        if self.accept("!"):
            return S.Unary("!", self.unary_expr(), loc=loc)
        if self.accept("-"):
            if self.tok.kind == "int":
                v = -int(self.tok.text)
                self.i += 1
                return S.Lit(v, loc=loc)
            return S.Unary("-", self.unary_expr(), loc=loc)
        return self.primary()

    def primary(self):
        tok = self.tok
        loc = self.loc()
        if tok.kind == "int":
            self.i += 1
            return S.Lit(int(tok.text), loc=loc)
        if self.accept("true"):
            return S.Lit(True, loc=loc)
        if self.accept("false"):
            return S.Lit(False, loc=loc)
        if self.at("if") or self.at("case"):
            return self.expr()
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind == "id":
            self.i += 1
            if self.accept("("):
                args = []
                if not self.at(")"):
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                self.expect(")")
                return S.Call(tok.text, tuple(args), loc=loc)
            return S.Var(tok.text, loc=loc)
        self.error("expression")

    def finish(self):
        if self.tok.kind != "eof":
            self.error("end of input")


# -- name resolution -------------------------------------------------------


def _resolve_expr(e, cons):
    if isinstance(e, S.Var):
        if e.name in cons:
            return S.ConApp(e.name, (), loc=e.loc)
        return e
    if isinstance(e, S.Lit):
        return e
    if isinstance(e, S.Call):
        args = tuple(_resolve_expr(a, cons) for a in e.args)
        if e.name in cons:
            return S.ConApp(e.name, args, loc=e.loc)
        if e.name in _BOOL_BUILTINS and len(args) == 2:
            return S.Binary(_BOOL_BUILTINS[e.name], args[0], args[1], loc=e.loc)
        if e.name == "not" and len(args) == 1:
            return S.Unary("!", args[0], loc=e.loc)
        return replace(e, args=args)
    if isinstance(e, S.ConApp):
        return replace(e, args=tuple(_resolve_expr(a, cons) for a in e.args))
    if isinstance(e, S.Case):
        return replace(
            e,
            scrutinee=_resolve_expr(e.scrutinee, cons),
            arms=tuple((_resolve_pat(p, cons), _resolve_expr(x, cons)) for p, x in e.arms),
        )
    if isinstance(e, S.If):
        return replace(
            e,
            cond=_resolve_expr(e.cond, cons),
            then=_resolve_expr(e.then, cons),
            orelse=_resolve_expr(e.orelse, cons),
        )
    if isinstance(e, S.Unary):
        return replace(e, operand=_resolve_expr(e.operand, cons))
    if isinstance(e, S.Binary):
        return replace(e, left=_resolve_expr(e.left, cons), right=_resolve_expr(e.right, cons))
    raise TypeError(e)


def _resolve_pat(p, cons):
    if isinstance(p, S.PVar) and p.name in cons:
        return S.PCon(p.name, (), loc=p.loc)
    if isinstance(p, S.PCon):
        return replace(p, args=tuple(_resolve_pat(a, cons) for a in p.args))
    return p


def resolve_model(model):
    """Turn raw names into constructor terms / boolean operators."""
    cons = set(model.constructors())
    r = lambda e: _resolve_expr(e, cons)  # noqa: E731
    funcs = tuple(replace(f, body=r(f.body)) for f in model.functions)
    comps = []
    for c in model.components:
        if c.efsm is not None:
            efsm = c.efsm
            locals_ = tuple(replace(l, init=r(l.init)) for l in efsm.locals)
            trans = tuple(
                replace(
                    t,
                    inputs=tuple((p, _resolve_pat(pat, cons)) for p, pat in t.inputs),
                    guard=None if t.guard is None else r(t.guard),
                    outputs=tuple((p, r(x)) for p, x in t.outputs),
                    assigns=tuple((n, r(x)) for n, x in t.assigns),
                )
                for t in efsm.transitions
            )
            c = replace(c, efsm=replace(efsm, locals=locals_, transitions=trans))
        comps.append(c)
    observe = model.observe
    if observe is not None:
        observe = replace(observe, query=r(observe.query), next=r(observe.next))
    return S.Model(model.types, funcs, tuple(comps), observe)


def parse_model(text, filename="<input>"):
    p = _Parser(text, filename)
    m = p.model()
    p.finish()
    return resolve_model(m)


def parse_expr(text, constructors=(), filename="<expr>"):
    p = _Parser(text, filename)
    e = p.expr()
    p.finish()
    return _resolve_expr(e, set(constructors))


def parse_pattern(text, constructors=(), filename="<pattern>"):
    p = _Parser(text, filename)
    pat = p.pattern()
    p.finish()
    return _resolve_pat(pat, set(constructors))


def parse_value(text, filename="<value>"):
    """Parse a value term such as ``Req(5)``, ``-3``, ``true`` or ``ε``.

    Every capitalised or lower-case name is read as a constructor here; value
    terms never contain variables.
    """
    text = text.strip()
    if text == "ε":
        return ABSENT
    p = _Parser(text, filename)
    v = _term(p)
    p.finish()
    return v


def _term(p):
    tok = p.tok
    if tok.kind == "int":
        p.i += 1
        return int(tok.text)
    if p.accept("-"):
        if p.tok.kind != "int":
            p.error("integer literal")
        v = -int(p.tok.text)
        p.i += 1
        return v
    if p.accept("true"):
        return True
    if p.accept("false"):
        return False
    if tok.kind == "id":
        p.i += 1
        args = []
        if p.accept("("):
            args.append(_term(p))
            while p.accept(","):
                args.append(_term(p))
            p.expect(")")
        return Con.make(tok.text, args)
    p.error("value term")


class _Everything:
    def __contains__(self, name):
        return True


def parse_value_pattern(text, filename="<pattern>"):
    """Parse a pattern in which every name is a constructor (no binders).

    Used for event patterns of test specifications, e.g. ``ConfigRequest(_)``.
    """
    p = _Parser(text, filename)
    pat = p.pattern()
    p.finish()
    return _resolve_pat(pat, _Everything())
