"""Newform Hecke-eigenvalue ingestion and congruence verification.

Eigenvalue data comes from a canonical on-disk JSON schema (one file per
LMFDB label); a thin web client can populate the store from the LMFDB API
when the network is available, but every verification below runs offline
and bit-exactly from fixtures.

A coefficient field K_f is handled only through its residue fields: a_n
is stored as an integer vector on a lattice basis, the basis is reduced
modulo a chosen irreducible factor of the defining polynomial, and the
congruence test happens inside a common finite field together with the
cyclotomic side.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from pathlib import Path

from sympy import Poly, Symbol, isprime, primerange

from . import fppoly
from .characters import DirichletChar
from .cyclotomic import CycNum
from .eisenstein import EisensteinParams, QExpansion
from .errors import (BadPrimeForBasis, CharacterMismatch, InsufficientData,
                     NetworkError, NonSquarefreeReduction, NotFound)
from .residue import FFElem, PrimeAbove, ff_embed, reduce_cyc

_PACKAGED_FIXTURES = Path(__file__).parent / "fixtures"


def sturm_bound(k: int, level: int) -> int:
    """ceil(k * mu / 12) with mu the index of Gamma_0(level): a sufficient
    coefficient bound for eigenform congruences."""
    mu = Fraction(level)
    for p in {p for p in range(2, level + 1) if level % p == 0 and isprime(p)}:
        mu *= Fraction(p + 1, p)
    val = Fraction(k) * mu / 12
    return -(-val.numerator // val.denominator)


def delta_qexp(b: int) -> QExpansion:
    """q * prod (1-q^n)^24 to precision b, the offline oracle for the
    level-one weight-12 cusp form."""
    coeffs = delta_an(b)
    return QExpansion(12, 1, DirichletChar(1, 1),
                      tuple(CycNum.from_rational(c) for c in coeffs))


def delta_an(b: int) -> list[int]:
    """Integer coefficients tau(0..b) (tau(0) = 0)."""
    if b < 1:
        raise ValueError("b must be >= 1")
    # Euler product via the pentagonal number theorem, then a 24th power.
    euler = [0] * b
    euler[0] = 1
    j = 1
    while True:
        g1 = j * (3 * j - 1) // 2
        g2 = j * (3 * j + 1) // 2
        if g1 >= b and g2 >= b:
            break
        s = 1 if j % 2 == 0 else -1
        if g1 < b:
            euler[g1] += s
        if g2 < b:
            euler[g2] += s
        j += 1

    def mul_trunc(f, g):
        out = [0] * b
        for i, a in enumerate(f):
            if a:
                top = min(b - i, len(g))
                for k in range(top):
                    if g[k]:
                        out[i + k] += a * g[k]
        return out

    acc = [1] + [0] * (b - 1)
    base = euler
    e = 24
    while e:
        if e & 1:
            acc = mul_trunc(acc, base)
        e >>= 1
        if e:
            base = mul_trunc(base, base)
    return [0] + acc[: b]


@dataclass(frozen=True)
class NewformData:
    """Complete eigenvalue package for one newform."""

    label: str
    level: int
    weight: int
    character: DirichletChar
    field_poly: tuple  # Fraction coefficients, lowest first, monic, irreducible
    basis: tuple       # rows of Fraction coords on the power basis of the root
    an: tuple          # an[i] = integer coordinate vector of a_(i+1) on basis

    @property
    def dim(self) -> int:
        return len(self.field_poly) - 1

    @property
    def b_data(self) -> int:
        return len(self.an)

    def a_vector(self, n: int) -> tuple:
        if not 1 <= n <= self.b_data:
            raise InsufficientData(f"a_{n} not stored (have {self.b_data})")
        return self.an[n - 1]

    def validate(self):
        d = self.dim
        if d < 1:
            raise ValueError("field_poly must have positive degree")
        if self.field_poly[-1] != 1:
            raise ValueError("field_poly must be monic")
        if any(len(row) != d for row in self.basis) or len(self.basis) != d:
            raise ValueError("basis must be a square matrix of the field degree")
        x = Symbol("x")
        if d > 1 and not Poly([Fraction(c) for c in reversed(self.field_poly)], x,
                              domain="QQ").is_irreducible:
            raise ValueError("field_poly is reducible")
        one = [Fraction(0)] * d
        for j, c in enumerate(self.a_vector(1)):
            for i in range(d):
                one[i] += c * self.basis[j][i]
        if one != [Fraction(1)] + [Fraction(0)] * (d - 1):
            raise ValueError("a_1 must represent 1 (normalised eigenform)")

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "level": self.level,
            "weight": self.weight,
            "character": self.character.label,
            "field_poly": [[str(c.numerator), str(c.denominator)]
                           for c in self.field_poly],
            "basis": [[[str(c.numerator), str(c.denominator)] for c in row]
                      for row in self.basis],
            "an": [[str(c) for c in vec] for vec in self.an],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "NewformData":
        nf = cls(
            label=obj["label"],
            level=int(obj["level"]),
            weight=int(obj["weight"]),
            character=DirichletChar.from_label(obj["character"]),
            field_poly=tuple(Fraction(int(p), int(q)) for p, q in obj["field_poly"]),
            basis=tuple(tuple(Fraction(int(p), int(q)) for p, q in row)
                        for row in obj["basis"]),
            an=tuple(tuple(int(c) for c in vec) for vec in obj["an"]),
        )
        nf.validate()
        return nf


# -- fixture store -----------------------------------------------------


def fixture_path(label: str, fixture_dir: str | os.PathLike | None = None) -> Path | None:
    """First existing fixture file for the label, searching the explicit
    directory, then EISCONG_FIXTURES, then the packaged data."""
    dirs = []
    if fixture_dir is not None:
        dirs.append(Path(fixture_dir))
    env = os.environ.get("EISCONG_FIXTURES")
    if env:
        dirs.append(Path(env))
    dirs.append(_PACKAGED_FIXTURES)
    for d in dirs:
        p = d / f"{label}.json"
        if p.is_file():
            return p
    return None


def load_fixture(label: str, fixture_dir=None) -> NewformData:
    p = fixture_path(label, fixture_dir)
    if p is None:
        raise NotFound(f"no fixture for label {label!r}")
    with open(p, encoding="utf-8") as fh:
        return NewformData.from_json(json.load(fh))


def save_fixture(nf: NewformData, fixture_dir) -> Path:
    d = Path(fixture_dir)
    d.mkdir(parents=True, exist_ok=True)
    p = d / f"{nf.label}.json"
    with open(p, "w", encoding="utf-8") as fh:
        json.dump(nf.to_json(), fh, indent=1)
        fh.write("\n")
    return p


class LmfdbClient:
    """Minimal, polite client for the LMFDB API: at most one request per
    second, exponential backoff, results always cached to disk by the
    caller.  Endpoint configurable for mirrors."""

    def __init__(self, endpoint: str | None = None, timeout: float = 30.0):
        self.endpoint = (endpoint or os.environ.get("EISCONG_ENDPOINT")
                         or "https://www.lmfdb.org/api").rstrip("/")
        self.timeout = timeout
        self._last_request = 0.0

    def _get(self, table: str, query: dict) -> list[dict]:
        import requests

        wait = self._last_request + 1.0 - time.monotonic()
        if wait > 0:
            time.sleep(wait)
        url = f"{self.endpoint}/{table}/"
        params = dict(query)
        params["_format"] = "json"
        delay = 1.0
        for attempt in range(3):
            self._last_request = time.monotonic()
            try:
                resp = requests.get(url, params=params, timeout=self.timeout)
                if resp.status_code == 200:
                    return resp.json().get("data", [])
                if resp.status_code in (429, 502, 503) and attempt < 2:
                    time.sleep(delay)
                    delay *= 2
                    continue
                raise NetworkError(f"GET {url} -> HTTP {resp.status_code}")
            except NetworkError:
                raise
            except Exception as exc:  # connection errors, bad JSON, ...
                if attempt == 2:
                    raise NetworkError(f"GET {url} failed: {exc}") from exc
                time.sleep(delay)
                delay *= 2
        raise NetworkError(f"GET {url} failed")

    def fetch(self, label: str) -> NewformData:
        forms = self._get("mf_newforms", {"label": label})
        if not forms:
            raise NotFound(f"label {label!r} not in mf_newforms")
        form = forms[0]
        hecke = self._get("mf_hecke_nf", {"label": label})
        if not hecke:
            raise NotFound(f"label {label!r} has no stored eigenvalue data")
        return convert_lmfdb_records(form, hecke[0])


def convert_lmfdb_records(form: dict, hecke: dict) -> NewformData:
    """Map an (mf_newforms, mf_hecke_nf) record pair onto the canonical
    fixture schema.  Coefficients are ascending lists; the hecke-ring
    basis is given by numerator rows over a per-row denominator, or is
    the power basis when flagged."""
    field_poly = [Fraction(c) for c in (hecke.get("field_poly") or form["field_poly"])]
    d = len(field_poly) - 1
    conrey = form.get("conrey_index")
    if conrey is None:
        conrey = min(form["conrey_indexes"])
    if hecke.get("hecke_ring_power_basis"):
        basis = [[Fraction(int(i == j)) for i in range(d)] for j in range(d)]
    else:
        nums = hecke["hecke_ring_numerators"]
        dens = hecke["hecke_ring_denominators"]
        basis = [[Fraction(int(nums[j][i]), int(dens[j])) for i in range(d)]
                 for j in range(d)]
    an = [tuple(int(c) for c in vec) for vec in hecke["an"]]
    nf = NewformData(
        label=form["label"],
        level=int(form["level"]),
        weight=int(form["weight"]),
        character=DirichletChar(int(form["level"]), int(conrey)),
        field_poly=tuple(field_poly),
        basis=tuple(tuple(row) for row in basis),
        an=tuple(an),
    )
    nf.validate()
    return nf


def fetch_newform(label: str, min_coeffs: int = 1, *, offline: bool = False,
                  fixture_dir=None, endpoint: str | None = None,
                  cache_dir=None) -> NewformData:
    """Fixture-first loader; falls back to the web API unless offline, and
    caches any fetched data back into the fixture store."""
    try:
        nf = load_fixture(label, fixture_dir)
    except NotFound:
        nf = None
    if nf is not None and nf.b_data >= min_coeffs:
        return nf
    if offline or os.environ.get("EISCONG_OFFLINE"):
        if nf is not None:
            raise InsufficientData(
                f"fixture for {label} has {nf.b_data} coefficients, need {min_coeffs}")
        raise NotFound(f"no fixture for {label!r} and offline mode is set")
    fetched = LmfdbClient(endpoint).fetch(label)
    if fetched.b_data < min_coeffs:
        raise InsufficientData(
            f"{label} provides {fetched.b_data} coefficients, need {min_coeffs}")
    save_fixture(fetched, cache_dir or fixture_dir or "fixtures")
    return fetched


# -- residue maps of the coefficient field ------------------------------


@dataclass(frozen=True)
class KfResidueMap:
    """Reduction of K_f at one prime above ell, named by an irreducible
    factor of the defining polynomial mod ell."""

    ell: int
    factor: tuple
    beta_images: tuple  # image of each basis row in F_ell[x]/(factor)

    @property
    def degree(self) -> int:
        return len(self.factor) - 1

    def reduce_vector(self, vec) -> FFElem:
        acc = FFElem.zero(self.ell, self.factor)
        for c, img in zip(vec, self.beta_images):
            if c:
                acc = acc + img * int(c)
        return acc


def residue_maps_of_kf(nf: NewformData, ell: int) -> list[KfResidueMap]:
    """One residue map per irreducible factor of field_poly mod ell, in
    canonical factor order."""
    den = 1
    for row in nf.basis:
        for c in row:
            den = den * c.denominator // gcd(den, c.denominator)
    if den % ell == 0:
        raise BadPrimeForBasis(f"ell = {ell} divides a basis denominator")
    fp_int = []
    for c in nf.field_poly:
        if c.denominator != 1:
            raise ValueError("field_poly must have integer coefficients")
        fp_int.append(int(c) % ell)
    fbar = fppoly.trim(list(fp_int))
    if len(fbar) - 1 != nf.dim:
        raise BadPrimeForBasis(f"field_poly degenerates mod {ell}")
    if len(fppoly.gcd(fbar, fppoly.derivative(fbar, ell), ell)) > 1:
        raise NonSquarefreeReduction(
            f"field_poly is not squarefree mod {ell}; skipping this ell")
    maps = []
    for g in fppoly.factor_squarefree(fbar, ell):
        imgs = []
        for row in nf.basis:
            vec = [int(c.numerator) * pow(c.denominator, -1, ell) % ell for c in row]
            imgs.append(FFElem.make(ell, tuple(g), vec))
        maps.append(KfResidueMap(ell, tuple(g), tuple(imgs)))
    return maps


# -- verification -------------------------------------------------------


@dataclass(frozen=True)
class CongruenceCertificate:
    """Replayable witness that a_q = psi(q) + phi(q) q^(k-1) holds mod a
    compatible prime for all checked q (or the first failure)."""

    label: str
    params: EisensteinParams
    ell: int
    lambda_prime: PrimeAbove
    field_poly_factor: tuple
    embedding_degree: int
    twist_f: int
    twist_cyc: int
    bound: int
    checked_primes: tuple
    include_ell: bool
    passed: bool
    first_failing_q: int | None = None

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "params": self.params.describe(),
            "ell": self.ell,
            "lambda_prime": self.lambda_prime.to_json(),
            "lambda_pretty": self.lambda_prime.pretty(),
            "field_poly_factor": list(self.field_poly_factor),
            "embedding_degree": self.embedding_degree,
            "twist_f": self.twist_f,
            "twist_cyc": self.twist_cyc,
            "bound": self.bound,
            "checked_primes": list(self.checked_primes),
            "include_ell": self.include_ell,
            "passed": self.passed,
            "first_failing_q": self.first_failing_q,
        }


def _checked_primes(params: EisensteinParams, bound: int, ell: int,
                    include_ell: bool) -> list[int]:
    nm = params.N * params.M
    out = []
    for q in primerange(2, bound + 1):
        if nm % q == 0:
            continue
        if q == ell and not include_ell:
            continue
        out.append(q)
    return out


def verify_congruence(nf: NewformData, params: EisensteinParams, lam: PrimeAbove,
                      bound: int | None = None, include_ell: bool = True
                      ) -> CongruenceCertificate:
    """Try every prime of K_f above ell and every pair of Frobenius twists
    of the two residue fields inside their common field; return the first
    passing certificate in enumeration order, else the best failing one."""
    if nf.character != params.chi_tilde:
        raise CharacterMismatch(
            f"newform character {nf.character.label} != lifted character "
            f"{params.chi_tilde.label}")
    if nf.level != params.N * params.M or nf.weight != params.k:
        raise ValueError("newform level/weight do not match the parameters")
    ell = lam.ell
    if bound is None:
        bound = sturm_bound(params.k, nf.level)
    if bound > nf.b_data:
        raise InsufficientData(
            f"need coefficients up to {bound}, fixture has {nf.b_data}")
    qs = _checked_primes(params, bound, ell, include_ell)
    k = params.k
    rhs = {}
    for q in qs:
        val = params.psi(q) + params.phi(q) * Fraction(q) ** (k - 1)
        rhs[q] = reduce_cyc(val, lam)
    e = lam.residue_degree
    maps = residue_maps_of_kf(nf, ell)
    combos = 0
    best = None  # (#passed prefix, certificate)
    for kmap in maps:
        d = kmap.degree
        r = lcm(d, e)
        lhs = {q: kmap.reduce_vector(nf.a_vector(q)) for q in qs}
        for jf in range(d):
            lhs_emb = {q: ff_embed(v, r, jf) for q, v in lhs.items()}
            for jc in range(e):
                combos += 1
                first_fail = None
                npass = 0
                for q in qs:
                    if lhs_emb[q] == ff_embed(rhs[q], r, jc):
                        npass += 1
                    else:
                        first_fail = q
                        break
                cert = CongruenceCertificate(
                    label=nf.label, params=params, ell=ell, lambda_prime=lam,
                    field_poly_factor=kmap.factor, embedding_degree=r,
                    twist_f=jf, twist_cyc=jc, bound=bound,
                    checked_primes=tuple(qs), include_ell=include_ell,
                    passed=first_fail is None, first_failing_q=first_fail)
                if cert.passed:
                    assert combos <= sum((len(m.factor) - 1) * e for m in maps)
                    return cert
                if best is None or npass > best[0]:
                    best = (npass, cert)
    assert combos == sum((len(m.factor) - 1) * e for m in maps)
    return best[1]


def replay_certificate(cert: CongruenceCertificate, nf: NewformData) -> bool:
    """True iff re-running the test with the certificate's recorded choices
    (factor, twists, bound, prime list) reproduces its stored outcome,
    including the first failing prime on a fail certificate."""
    params, lam = cert.params, cert.lambda_prime
    kmap = next(m for m in residue_maps_of_kf(nf, cert.ell)
                if m.factor == cert.field_poly_factor)
    r = cert.embedding_degree
    k = params.k
    for q in cert.checked_primes:
        lhs = ff_embed(kmap.reduce_vector(nf.a_vector(q)), r, cert.twist_f)
        val = params.psi(q) + params.phi(q) * Fraction(q) ** (k - 1)
        rhs = ff_embed(reduce_cyc(val, lam), r, cert.twist_cyc)
        if lhs != rhs:
            return (not cert.passed) and q == cert.first_failing_q
    return cert.passed
