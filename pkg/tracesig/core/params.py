"""
Scheme parameters.
ParamSet holds every public scalar, setup() searches primes q′ and q meeting all
lower bounds, and validate_params() produces a machine-checkable constraint report.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple

from sympy import isprime, nextprime

from ..errors import ParameterError
from .encoding import ArtifactMixin, Decoder, Encoder
from .lattice import MAX_MODULUS, digit_count
from .samplers import gadget_width, smoothing_constant, trapdoor_norm_bound

logger = logging.getLogger(__name__)

WIDTH_MARGIN = 1.05
ALPHA_SAFETY = 0.9
MAX_SEARCH_ROUNDS = 64


@dataclass(frozen=True)
class ParamSet(ArtifactMixin):
    """Every public scalar of the scheme. Desk parameters are functional, not secure."""

    MAGIC = b"TSPP"

    lambda_desk: int
    n: int
    N: int
    ell: int
    q: int
    q_prime: int
    m_F: int
    m_B: int
    m_1: int
    m_2: int
    m_M: int
    sigma_sign: float
    sigma_com: float
    sigma_verif: float
    beta_1: int
    beta_2: int
    alpha_gpv: float
    sigma_gpv: float
    B_gpv: int
    B_lwe: int
    sigma_lwe: float
    l1: int
    l2: int
    sigma_1: float
    sigma_2: float
    p: int
    kappa: int
    M_rej: float
    n_sign: int = 0
    ell_sign: int = 0
    n_claim: int = 0
    ell_claim: int = 0
    ots_vklen: int = 256
    rho_bytes: int = 32

    @property
    def k(self) -> int:
        """⌈log2 q⌉."""
        return digit_count(self.q)

    @property
    def k_prime(self) -> int:
        """⌈log2 q′⌉."""
        return digit_count(self.q_prime)

    @property
    def ibe_scale(self) -> int:
        """⌈q′/(2(N+1))⌋."""
        return (self.q_prime + (self.N + 1)) // (2 * (self.N + 1))

    @property
    def ybits_len(self) -> int:
        return self.m_B * self.k_prime

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)

    def to_bytes(self) -> bytes:
        enc = Encoder()
        for item in dataclasses.fields(self):
            value = getattr(self, item.name)
            if item.type in (float, "float"):
                enc.f64(float(value))
            else:
                enc.integer(int(value))
        return enc.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "ParamSet":
        dec = Decoder(data)
        values = {}
        for item in dataclasses.fields(cls):
            values[item.name] = dec.f64() if item.type in (float, "float") else dec.integer()
        dec.done()
        return cls(**values)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ParamSet":
        names = {item.name for item in dataclasses.fields(cls)}
        return cls(**{key: value for key, value in data.items() if key in names})


@dataclass(frozen=True)
class ConstraintRow:
    name: str
    lhs: float
    op: str
    rhs: float
    passed: bool
    note: str = ""

    def format(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = f"[{status}] {self.name}: {_fmt(self.lhs)} {self.op} {_fmt(self.rhs)}"
        return f"{line}  ({self.note})" if self.note else line


@dataclass
class ConstraintReport:
    rows: List[ConstraintRow]
    notes: List[str] = dataclasses.field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def failures(self) -> List[ConstraintRow]:
        return [row for row in self.rows if not row.passed]

    def row(self, name: str) -> ConstraintRow:
        for row in self.rows:
            if row.name == name:
                return row
        raise KeyError(name)

    def format(self) -> str:
        lines = [row.format() for row in self.rows]
        return "\n".join(lines + [f"[INFO] {note}" for note in self.notes])


def _fmt(value: float) -> str:
    if isinstance(value, float) and not value.is_integer():
        return f"{value:.6g}"
    return str(int(value))


def _check(name: str, lhs: float, op: str, rhs: float, note: str = "") -> ConstraintRow:
    tests = {
        "<": lambda a, b: a < b,
        "<=": lambda a, b: a <= b,
        ">": lambda a, b: a > b,
        ">=": lambda a, b: a >= b,
        "==": lambda a, b: a == b,
        "~=": lambda a, b: math.isclose(a, b, rel_tol=1e-9),
    }
    return ConstraintRow(name, lhs, op, rhs, bool(tests[op](lhs, rhs)), note)


def preimage_width(rows: int, cols: int, kind: str) -> float:
    """
    Output width for sample_d that holds for every trapdoor within the norm bound.

    Covers both the floor c·√(1+‖R‖₂²) and positivity of the perturbation
    variance σ² − σ_g²·‖(R;I) row‖² for rows with at most `cols` unit entries.
    """
    dim = rows + cols
    c = smoothing_constant(dim)
    sigma_g = gadget_width(dim)
    s1 = trapdoor_norm_bound(rows, cols, kind)
    return WIDTH_MARGIN * max(math.sqrt(sigma_g ** 2 * max(cols, 1) + c * c), c * math.sqrt(1.0 + s1 * s1))


def zk_widths(l1: int, l2: int, n_stmt: int, ell_stmt: int, p: int) -> Tuple[float, float, float]:
    """(σ1, σ2, M) for the Σ-protocol on a statement with n′ variables and ℓ triples."""
    sigma_1 = math.sqrt(2.0 * l2 / math.pi)
    width = 2 * l1 + 2 * l2 + n_stmt + ell_stmt
    log_l = math.log2(width)
    sigma_2 = 2.0 * p * width * log_l * sigma_1
    return sigma_1, sigma_2, math.exp(1.0 / (log_l * log_l))


def zk_modulus_bound(pp: ParamSet) -> float:
    """16p·max(l1+l2+n′, l1+l2+ℓ)·(σ2 + pσ1)·√l1·log2 l1 (the Õ(√l1) factor made explicit)."""
    span = max(pp.l1 + pp.l2 + max(pp.n_sign, pp.n_claim), pp.l1 + pp.l2 + max(pp.ell_sign, pp.ell_claim))
    factor = math.sqrt(pp.l1) * max(math.log2(pp.l1), 1.0)
    return 16.0 * pp.p * span * (pp.sigma_2 + pp.p * pp.sigma_1) * factor


def soundness_error(pp: ParamSet) -> float:
    """Per-proof soundness error of κ parallel repetitions with 4 of 2p+1 challenges opened."""
    return (2.0 / (2 * pp.p + 1)) ** pp.kappa


def _scheme_side(lambda_desk: int, n: int, N: int, B_lwe: int) -> Dict[str, Any]:
    """Search q′ and the GPV parameters (fixed point in ⌈log q′⌉)."""
    q_prime = int(nextprime(max((4 * B_lwe + 1) ** 2, N)))
    for _ in range(MAX_SEARCH_ROUNDS):
        kp = digit_count(q_prime)
        m_B = 2 * n * kp + lambda_desk
        sigma_gpv = preimage_width(m_B - n * kp, n * kp, "binary")
        need = max((4 * B_lwe + 1) ** 2, 2.0 * sigma_gpv * math.sqrt(m_B) * B_lwe, N)
        if q_prime > need:
            logger.debug("q' search settled at %d (%d bits)", q_prime, kp)
            ceiling = (q_prime / (4.0 * (N + 1))) / (q_prime * math.sqrt(n) * sigma_gpv * math.sqrt(m_B + 1))
            alpha = ALPHA_SAFETY * ceiling
            return {
                "q_prime": q_prime,
                "m_B": m_B,
                "m_F": n * kp + lambda_desk,
                "sigma_gpv": sigma_gpv,
                "alpha_gpv": alpha,
                "B_gpv": max(1, math.ceil(alpha * q_prime * math.sqrt(m_B + 1))),
            }
        q_prime = int(nextprime(int(math.floor(need))))
    raise ParameterError("q' search did not converge")


def _certificate_side(lambda_desk: int, n: int, k: int) -> Dict[str, Any]:
    m_2 = n * k
    m_1 = math.ceil((n * k + lambda_desk) / math.log2(3))
    sigma_sign = preimage_width(m_1, m_2, "ternary")
    sigma_com = sigma_sign
    sigma_verif = math.sqrt(sigma_com ** 2 + sigma_sign ** 2)
    return {
        "m_1": m_1,
        "m_2": m_2,
        "sigma_sign": sigma_sign,
        "sigma_com": sigma_com,
        "sigma_verif": sigma_verif,
        "beta_1": math.ceil(sigma_verif * math.log2(m_1)),
        "beta_2": math.ceil(sigma_sign * math.log2(m_2)),
    }


def setup(lambda_desk: int, N: int, n: Optional[int] = None, kappa: int = 8, p: int = 2,
          B_lwe: int = 3, sigma_lwe: float = 1.5) -> ParamSet:
    """
    Derive a validated ParamSet.

    Args:
        lambda_desk: Desk security knob (also the Θ(λ) slack in m_F, m_B and l1 = l2).
        N: Maximum group size, of the form 2^ell − 1.
        n: Lattice dimension (defaults to lambda_desk).
        kappa: Unruh repetitions.
        p: Challenge range [−p, p].
        B_lwe: LWE error bound.
        sigma_lwe: Width of the LWE error distribution before truncation.

    Returns:
        ParamSet whose constraint report passes.

    Raises:
        ParameterError: If N is not 2^ell − 1, or no prime q below 2^52 meets the bounds.
    """
    from ..zk.relations import q_lower_bounds, statement_shape

    if N < 1 or (N + 1) & N:
        raise ParameterError(f"group size N={N} is not of the form 2^ell - 1")
    if p < 2:
        raise ParameterError("p must be at least 2 so that 4 distinct challenges exist")
    if lambda_desk < 2:
        raise ParameterError("lambda_desk must be at least 2")
    n = lambda_desk if n is None else int(n)
    ell = (N + 1).bit_length() - 1
    scheme = _scheme_side(lambda_desk, n, N, B_lwe)

    k = max(digit_count(scheme["q_prime"]) + 1, 20)
    for round_index in range(MAX_SEARCH_ROUNDS):
        cert = _certificate_side(lambda_desk, n, k)
        draft = ParamSet(
            lambda_desk=lambda_desk, n=n, N=N, ell=ell, q=(1 << (k - 1)) + 1, m_M=3 * n,
            B_lwe=B_lwe, sigma_lwe=sigma_lwe, l1=lambda_desk, l2=lambda_desk,
            sigma_1=0.0, sigma_2=0.0, p=p, kappa=kappa, M_rej=1.0, **scheme, **cert,
        )
        n_sign, ell_sign, _ = statement_shape(draft, "sign")
        n_claim, ell_claim, _ = statement_shape(draft, "claim")
        sigma_1, sigma_2, m_rej = zk_widths(draft.l1, draft.l2, n_sign, ell_sign, p)
        draft = dataclasses.replace(draft, sigma_1=sigma_1, sigma_2=sigma_2, M_rej=m_rej,
                                    n_sign=n_sign, ell_sign=ell_sign, n_claim=n_claim, ell_claim=ell_claim)
        need = max([zk_modulus_bound(draft), N, scheme["q_prime"]] + [b for _, b in q_lower_bounds(draft)])
        # q > 2^(k-1) keeps ⌈log q⌉ ≥ k, so k only grows across rounds
        q = int(nextprime(int(math.floor(max(need, 1 << (k - 1))))))
        if q > MAX_MODULUS:
            raise ParameterError(f"no prime q below 2^52 meets the lower bound {need:.3g}")
        logger.debug("q search round %d: k=%d need=%.4g q=%d", round_index, k, need, q)
        if digit_count(q) == k:
            pp = dataclasses.replace(draft, q=q)
            report = validate_params(pp)
            if not report.passed:
                raise ParameterError("derived parameters fail validation:\n"
                                     + "\n".join(row.format() for row in report.failures()))
            logger.info("Parameters ready: n=%d N=%d q'=%d q=%d (%d bits) n_sign=%d",
                        n, N, pp.q_prime, q, k, n_sign)
            return pp
        k = digit_count(q)
    raise ParameterError("q search did not converge")


PRESETS: Dict[str, Dict[str, Any]] = {
    "desk": {"lambda_desk": 16, "N": 7, "kappa": 8, "p": 2, "B_lwe": 3},
    "toy": {"lambda_desk": 8, "N": 3, "n": 4, "kappa": 4, "p": 2, "B_lwe": 3},
}


@lru_cache(maxsize=8)
def preset(name: str) -> ParamSet:
    """Named parameter preset ('desk' or 'toy')."""
    if name not in PRESETS:
        raise ParameterError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return setup(**PRESETS[name])


def validate_params(pp: ParamSet) -> ConstraintReport:
    """Evaluate every parameter constraint; report-only, never raises on violations."""
    from ..zk.relations import q_lower_bounds

    kp = digit_count(pp.q_prime)
    k = digit_count(pp.q)
    rows = [
        _check("q prime", int(bool(isprime(pp.q))), "==", 1),
        _check("q' prime", int(bool(isprime(pp.q_prime))), "==", 1),
        _check("q > N", pp.q, ">", pp.N),
        _check("q' < q", pp.q_prime, "<", pp.q),
        _check("q <= 2^52", pp.q, "<=", MAX_MODULUS, "float-assisted exact multiplication"),
        _check("N = 2^ell - 1", pp.N, "==", (1 << pp.ell) - 1),
        _check("(4B_lwe+1)^2 < q'", (4 * pp.B_lwe + 1) ** 2, "<", pp.q_prime),
        _check("sigma_gpv*sqrt(m_B)*B_lwe < q'/2", pp.sigma_gpv * math.sqrt(pp.m_B) * pp.B_lwe, "<",
               pp.q_prime / 2, "stated against q; the lift happens mod q', so q'/2 is enforced"),
        _check("alpha*q'*sqrt(n)*sigma_gpv*sqrt(m_B+1) < q'/(4(N+1))",
               pp.alpha_gpv * pp.q_prime * math.sqrt(pp.n) * pp.sigma_gpv * math.sqrt(pp.m_B + 1), "<",
               pp.q_prime / (4 * (pp.N + 1))),
        _check("m_F = n*ceil(log q') + lambda", pp.m_F, "==", pp.n * kp + pp.lambda_desk),
        _check("m_B = 2n*ceil(log q') + lambda", pp.m_B, "==", 2 * pp.n * kp + pp.lambda_desk),
        _check("m_M = 3n", pp.m_M, "==", 3 * pp.n),
        _check("m_2 = n*ceil(log q)", pp.m_2, "==", pp.n * k),
        _check("sigma_verif^2 = sigma_com^2 + sigma_sign^2", pp.sigma_verif ** 2, "~=",
               pp.sigma_com ** 2 + pp.sigma_sign ** 2),
        _check("beta_1 >= sigma_verif*log m_1", pp.beta_1, ">=", pp.sigma_verif * math.log2(pp.m_1)),
        _check("beta_2 >= sigma_sign*log m_2", pp.beta_2, ">=", pp.sigma_sign * math.log2(pp.m_2)),
        _check("sigma_sign >= sampler width", pp.sigma_sign, ">=", preimage_width(pp.m_1, pp.m_2, "ternary") - 1e-9,
               f"c = sqrt(ln(2*dim*2^40)/pi) = {smoothing_constant(pp.m_1 + pp.m_2):.4f}"),
        _check("sigma_gpv >= sampler width", pp.sigma_gpv, ">=",
               preimage_width(pp.m_B - pp.n * kp, pp.n * kp, "binary") - 1e-9,
               f"c = {smoothing_constant(pp.m_B):.4f}"),
        _check("p >= 2", pp.p, ">=", 2),
        _check("p < q/2", pp.p, "<", pp.q / 2),
        _check("q >= ZK bound", pp.q, ">=", zk_modulus_bound(pp), "O~(sqrt l1) taken as sqrt(l1)*log l1"),
        _check("sigma_1 >= sqrt(2 l2/pi)", pp.sigma_1, ">=", math.sqrt(2.0 * pp.l2 / math.pi) - 1e-12,
               f"l1 = l2 = {pp.l1}"),
    ]
    for name, bound in q_lower_bounds(pp):
        rows.append(_check(f"q > {name}", pp.q, ">", bound))
    notes = [f"soundness error (2/(2p+1))^kappa = {soundness_error(pp):.3g} at kappa = {pp.kappa}, "
             f"against 2^-lambda = {2.0 ** -pp.lambda_desk:.3g}"]
    return ConstraintReport(rows, notes)
