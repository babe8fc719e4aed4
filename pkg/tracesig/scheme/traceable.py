"""
Traceable group signatures.

Key generation, the three-message Join, Sign/Verify, Open, Reveal, Trace and
Claim/ClaimVerify over the tag signature, GPV-IBE, hash-based signatures and the
Unruh NIZK. Every artifact type here frames itself with ArtifactMixin.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..core.encoding import ArtifactMixin, Decoder, Encoder, entry_width, signed_width
from ..core.lattice import (RANK_PRIME, BitVector, IntVector, ZqMatrix, ZqVector, bin_decompose, bin_recompose,
                            centered, inf_norm, matvec_mod, reduce, solve_mod)
from ..core.oracles import CLAIM_ORACLES, SIGN_ORACLES, OracleTag, ro_zq_matrix
from ..core.params import ParamSet
from ..core.samplers import (TAIL_CUT, GTrapdoor, RngHandle, sample_bounded_error, sample_kernel_basis,
                             trapdoor_gen_binary, trapdoor_norm_bound)
from ..errors import (JoinRejectedError, ParameterError, SamplingError, TraceSigError, WitnessError)
from ..zk.commitments import BdlopCrs, bdlop_setup
from ..zk.relations import (CLAIM_KIND, SIGN_KIND, CompiledStatement, SignPublic, assemble_claim_statement,
                            assemble_sign_statement, assemble_witness, claim_values, sign_values,
                            statement_shape)
from ..zk.quadratic import QuadraticWitness
from ..zk.unruh import CHALLENGES_PER_REPETITION, NizkProof, SokContext, nizk_prove, nizk_verify
from .gpv_ibe import IbeCiphertext, OpeningKey, ibe_decrypt, ibe_encrypt_full, ibe_extract, ibe_identity
from .hashsig import (CHAIN_COUNT, HASH_BYTES, OTS_SCHEME_ID, OtsKeypair, UserSigKeypair, ots_keygen, ots_sign,
                      ots_verify, usersig_sign, usersig_verify)
from .registry import Registry, Transcript
from .signatures import TagSignature, TagSigKeypair, TagSigPublicKey, tagsig_keygen, tagsig_sign, tagsig_verify

logger = logging.getLogger(__name__)

REVEAL_ATTEMPTS = 3


@dataclass(eq=False)
class GroupPublicKey(ArtifactMixin):
    """gpk = (A, A′, D, u, B, F, OTS, crs seed) together with the parameters."""

    pp: ParamSet
    tagsig: TagSigPublicKey
    B: ZqMatrix
    F: ZqMatrix
    crs_seed: bytes
    ots_scheme: str = OTS_SCHEME_ID
    _crs: Dict[str, BdlopCrs] = field(default_factory=dict, repr=False)

    MAGIC = b"TGPK"

    def crs(self, kind: str) -> BdlopCrs:
        """Commitment key for the sign or claim statement, derived from the crs seed."""
        if kind not in self._crs:
            pp = self.pp
            n_vars, n_triples = (pp.n_sign, pp.ell_sign) if kind == SIGN_KIND else (pp.n_claim, pp.ell_claim)
            rng = RngHandle(self.crs_seed).child(f"crs-{kind}", 0)
            self._crs[kind] = bdlop_setup(pp.l1, pp.l2, n_vars, n_triples, pp.q, rng, pp.sigma_1, pp.sigma_2,
                                          pp.p, pp.M_rej, pp.kappa)
        return self._crs[kind]

    def to_bytes(self) -> bytes:
        enc = Encoder().raw(self.pp.to_bytes())
        self.tagsig.encode(enc)
        return enc.zq_matrix(self.B).zq_matrix(self.F).raw(self.crs_seed).text(self.ots_scheme).getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "GroupPublicKey":
        dec = Decoder(data)
        pp = ParamSet.from_bytes(dec.raw())
        tagsig = TagSigPublicKey.decode(dec)
        B, F = dec.zq_matrix(), dec.zq_matrix()
        seed, scheme = dec.raw(), dec.text()
        dec.done()
        return cls(pp, tagsig, B, F, seed, scheme)


@dataclass(eq=False)
class GroupManagerKey(ArtifactMixin):
    """gsk = R_A."""

    trapdoor: GTrapdoor

    MAGIC = b"TGSK"

    def to_bytes(self) -> bytes:
        enc = Encoder()
        self.trapdoor.encode(enc)
        return enc.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "GroupManagerKey":
        dec = Decoder(data)
        trapdoor = GTrapdoor.decode(dec)
        dec.done()
        return cls(trapdoor)


@dataclass(eq=False)
class UserSecret(ArtifactMixin):
    """usk = z ∈ {0,1}^{m_F}."""

    z: BitVector

    MAGIC = b"TUSK"

    def to_bytes(self) -> bytes:
        return Encoder().bit_vector(self.z).getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "UserSecret":
        dec = Decoder(data)
        z = dec.bit_vector()
        dec.done()
        return cls(z)


@dataclass(eq=False)
class Certificate(ArtifactMixin):
    """cert = (id, y, v1, v2)."""

    ident: int
    y: ZqVector
    v1: IntVector
    v2: IntVector

    MAGIC = b"TCRT"

    @property
    def ybits(self) -> BitVector:
        return bin_decompose(self.y)

    @property
    def tag_signature(self) -> TagSignature:
        return TagSignature(self.ident, self.v1, self.v2)

    def to_bytes(self) -> bytes:
        return Encoder().u32(self.ident).zq_vector(self.y).int_vector(self.v1).int_vector(self.v2).getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Certificate":
        dec = Decoder(data)
        cert = cls(dec.u32(), dec.zq_vector(), dec.int_vector(), dec.int_vector())
        dec.done()
        return cert


@dataclass(eq=False)
class TracingTrapdoor(ArtifactMixin):
    """trace_id = x = F·z mod q′."""

    x: ZqVector

    MAGIC = b"TTRD"

    def to_bytes(self) -> bytes:
        return Encoder().zq_vector(self.x).getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "TracingTrapdoor":
        dec = Decoder(data)
        x = dec.zq_vector()
        dec.done()
        return cls(x)


@dataclass(eq=False)
class GroupSignature(ArtifactMixin):
    """Σ = (ρ, c, t, π, vk, sig)."""

    rho: bytes
    c: IbeCiphertext
    t: ZqVector
    proof: NizkProof
    vk: bytes
    sig: bytes

    MAGIC = b"TSIG"

    def body_bytes(self) -> bytes:
        """The OTS message (ρ, c, t, π)."""
        return (Encoder().raw(self.rho).zq_vector(self.c.c).zq_vector(self.t).raw(self.proof.to_bytes())
                .getvalue())

    def to_bytes(self) -> bytes:
        return Encoder().fixed(self.body_bytes()).raw(self.vk).raw(self.sig).getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "GroupSignature":
        dec = Decoder(data)
        rho, c, t = dec.raw(), dec.zq_vector(), dec.zq_vector()
        proof = NizkProof.from_bytes(dec.raw())
        vk, sig = dec.raw(), dec.raw()
        dec.done()
        return cls(rho, IbeCiphertext(c), t, proof, vk, sig)


@dataclass(eq=False)
class ClaimProof(ArtifactMixin):
    chi: NizkProof

    MAGIC = b"TCLM"

    def to_bytes(self) -> bytes:
        return self.chi.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "ClaimProof":
        return cls(NizkProof.from_bytes(data))


@dataclass(eq=False)
class JoinRequest(ArtifactMixin):
    """(bin(y), σ_user) plus the user verification key it verifies under."""

    ybits: BitVector
    user_vk: bytes
    user_sig: bytes

    MAGIC = b"TJRQ"

    def to_bytes(self) -> bytes:
        return Encoder().bit_vector(self.ybits).raw(self.user_vk).raw(self.user_sig).getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "JoinRequest":
        dec = Decoder(data)
        request = cls(dec.bit_vector(), dec.raw(), dec.raw())
        dec.done()
        return request


@dataclass(eq=False)
class JoinResponse(ArtifactMixin):
    signature: TagSignature

    MAGIC = b"TJRS"

    @property
    def ident(self) -> int:
        return self.signature.ident

    def to_bytes(self) -> bytes:
        enc = Encoder()
        self.signature.encode(enc)
        return enc.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "JoinResponse":
        dec = Decoder(data)
        signature = TagSignature.decode(dec)
        dec.done()
        return cls(signature)


@dataclass(eq=False)
class PendingUser(ArtifactMixin):
    """The user's side of an unfinished join: (z, x, e, y)."""

    z: BitVector
    x: ZqVector
    e: IntVector
    y: ZqVector

    MAGIC = b"TPND"

    def to_bytes(self) -> bytes:
        return Encoder().bit_vector(self.z).zq_vector(self.x).int_vector(self.e).zq_vector(self.y).getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "PendingUser":
        dec = Decoder(data)
        pending = cls(dec.bit_vector(), dec.zq_vector(), dec.int_vector(), dec.zq_vector())
        dec.done()
        return pending


@dataclass
class AuditResult:
    ident: Optional[int]
    registered: bool
    transcript: Optional[Transcript] = None


def keygen(pp: ParamSet, rng: RngHandle) -> Tuple[GroupPublicKey, GroupManagerKey, OpeningKey, Registry]:
    """
    Generate (gpk, gsk, osk) and an empty registry.

    Raises:
        ParameterError: If trapdoor generation keeps failing.
    """
    tag_keys = tagsig_keygen(pp, rng.spawn("tagsig"))
    kp = pp.k_prime
    B, S_B = trapdoor_gen_binary(pp.n, pp.m_B, pp.q_prime, rng.spawn("ibe"),
                                 norm_bound=trapdoor_norm_bound(pp.m_B - pp.n * kp, pp.n * kp, "binary"))
    F = ZqMatrix(rng.uniform_zq((pp.n, pp.m_F), pp.q_prime), pp.q_prime)
    gpk = GroupPublicKey(pp, tag_keys.vk, B, F, rng.bytes(32))
    osk = OpeningKey(S_B, rng.bytes(32))
    logger.info("Group keys ready: n=%d N=%d q=%d q'=%d", pp.n, pp.N, pp.q, pp.q_prime)
    return gpk, GroupManagerKey(tag_keys.sk), osk, Registry(pp.N)


def _lwe_error(pp: ParamSet, dim: int, rng: RngHandle) -> np.ndarray:
    return sample_bounded_error(pp.sigma_lwe, pp.B_lwe, dim, rng).entries


def _one_way(gpk: GroupPublicKey, z: BitVector) -> ZqVector:
    """x = F·z mod q′."""
    return gpk.F.matvec(z)


def _lwe_sample(gpk: GroupPublicKey, x: ZqVector, e: np.ndarray) -> ZqVector:
    """y = Bᵀx + e mod q′."""
    return gpk.B.T.matvec(x) + ZqVector.from_signed(e, gpk.pp.q_prime)


def _join_message(ybits: BitVector) -> bytes:
    return Encoder().text("tracesig/join").bit_vector(ybits).getvalue()


def join_user_request(gpk: GroupPublicKey, user_keys: UserSigKeypair,
                      rng: RngHandle) -> Tuple[JoinRequest, PendingUser]:
    """Fresh z, x = F·z, y = Bᵀx + e; request (bin(y), σ_user)."""
    pp = gpk.pp
    z = BitVector(rng.bits(pp.m_F))
    x = _one_way(gpk, z)
    e = _lwe_error(pp, pp.m_B, rng)
    y = _lwe_sample(gpk, x, e)
    ybits = bin_decompose(y)
    user_sig = usersig_sign(user_keys.sk, _join_message(ybits))
    return (JoinRequest(ybits, user_keys.vk, user_sig),
            PendingUser(z, x, IntVector(e, bound=pp.B_lwe), y))


def join_gm_process(gpk: GroupPublicKey, gsk: GroupManagerKey, registry: Registry, request: JoinRequest,
                    rng: RngHandle) -> Tuple[JoinResponse, Registry]:
    """
    Check σ_user and freshness of bin(y), then certify bin(y) under tag id = st + 1.

    Raises:
        JoinRejectedError: On a bad user signature, malformed or duplicate bin(y).
        CapacityError: If the group is full.
    """
    pp = gpk.pp
    if len(request.ybits) != pp.ybits_len:
        raise JoinRejectedError(f"bin(y) has {len(request.ybits)} bits, expected {pp.ybits_len}")
    if not usersig_verify(request.user_vk, _join_message(request.ybits), request.user_sig):
        raise JoinRejectedError("user signature on bin(y) does not verify")
    registry.check_admissible(request.ybits)
    ident = registry.next_id
    keypair = TagSigKeypair(gpk.tagsig, gsk.trapdoor)
    signature = tagsig_sign(pp, keypair, ident, request.ybits, rng)
    registry.append(Transcript(ident, request.ybits, request.user_vk, request.user_sig, signature))
    logger.info("Member %d joined (%d of %d)", ident, registry.counter, registry.capacity)
    return JoinResponse(signature), registry


def join_user_finalize(gpk: GroupPublicKey, pending: PendingUser,
                       response: JoinResponse) -> Tuple[int, UserSecret, Certificate]:
    """
    Raises:
        JoinRejectedError: If the issued certificate fails its verification equation.
    """
    ybits = bin_decompose(pending.y)
    if not tagsig_verify(gpk.pp, gpk.tagsig, response.signature, ybits):
        raise JoinRejectedError("issued certificate does not verify")
    sig = response.signature
    return sig.ident, UserSecret(pending.z), Certificate(sig.ident, pending.y, sig.v1, sig.v2)


def _lwe_matrix(pp: ParamSet, rho: bytes) -> ZqMatrix:
    """M = H_LWE(ρ) ∈ Z_{q′}^{m_M × n}."""
    return ro_zq_matrix(OracleTag.LWE, rho, pp.m_M, pp.n, pp.q_prime)


def _check_shape(compiled: CompiledStatement, n_vars: int, n_triples: int) -> None:
    if (compiled.n_vars, compiled.n_triples) != (n_vars, n_triples):
        raise ParameterError(f"{compiled.kind} statement has shape ({compiled.n_vars}, {compiled.n_triples}), "
                             f"parameters expect ({n_vars}, {n_triples})")


def _sign_statement(gpk: GroupPublicKey, vk: bytes, c: IbeCiphertext, M: ZqMatrix,
                    t: ZqVector) -> CompiledStatement:
    pp = gpk.pp
    public = SignPublic(A=gpk.tagsig.A, A_prime=gpk.tagsig.A_prime, D=gpk.tagsig.D, u=gpk.tagsig.u,
                        B=gpk.B, F=gpk.F, v=ibe_identity(vk, pp.n, pp.q_prime), c=c.c, M=M, t=t)
    compiled = assemble_sign_statement(public, pp)
    _check_shape(compiled, pp.n_sign, pp.ell_sign)
    return compiled


def _claim_statement(gpk: GroupPublicKey, M: ZqMatrix, t: ZqVector) -> CompiledStatement:
    compiled = assemble_claim_statement(gpk.F, M, t, gpk.pp)
    _check_shape(compiled, gpk.pp.n_claim, gpk.pp.ell_claim)
    return compiled


def _well_formed(gpk: GroupPublicKey, sig: GroupSignature) -> bool:
    pp = gpk.pp
    return (len(sig.rho) == pp.rho_bytes
            and sig.c.c.modulus == pp.q_prime and len(sig.c) == pp.m_B + 1
            and sig.t.modulus == pp.q_prime and len(sig.t) == pp.m_M)


@dataclass(eq=False)
class SignInstance:
    """Everything sign() commits to before proving: the OTS key, (ρ, c, t) and the compiled relation."""

    ots: OtsKeypair
    rho: bytes
    c: IbeCiphertext
    t: ZqVector
    compiled: CompiledStatement
    witness: QuadraticWitness


def prepare_sign(gpk: GroupPublicKey, usk: UserSecret, cert: Certificate, rng: RngHandle) -> SignInstance:
    """
    Sample the OTS key, encrypt the id, draw ρ and the tag t, and compile the signing witness.

    Raises:
        WitnessError: If (usk, cert) do not form a valid membership credential.
    """
    pp = gpk.pp
    x = _one_way(gpk, usk.z)
    e = centered((cert.y - gpk.B.T.matvec(x)).entries, pp.q_prime)
    if inf_norm(e) > pp.B_lwe:
        raise WitnessError("certificate does not belong to this user secret")
    ots = ots_keygen(rng.spawn("ots"))
    c, randomness = ibe_encrypt_full(pp, gpk.B, ots.vk, cert.ident, rng)
    rho = rng.bytes(pp.rho_bytes)
    M = _lwe_matrix(pp, rho)
    e_t = _lwe_error(pp, pp.m_M, rng)
    t = M.matvec(x) + ZqVector.from_signed(e_t, pp.q_prime)

    compiled = _sign_statement(gpk, ots.vk, c, M, t)
    values = sign_values(pp, z=usk.z.entries, x=x.entries, y=cert.y.entries, e=e, r=randomness.r,
                         e_c=randomness.e_c, e_t=e_t, ident=cert.ident, v1=cert.v1.entries, v2=cert.v2.entries)
    return SignInstance(ots, rho, c, t, compiled, assemble_witness(compiled, values))


def sign(gpk: GroupPublicKey, usk: UserSecret, cert: Certificate, message: bytes, rng: RngHandle) -> GroupSignature:
    """
    Produce Σ = (ρ, c, t, π, vk, sig).

    Raises:
        WitnessError: If (usk, cert) do not form a valid membership credential.
        ProvingError: If the prover exhausts its restart budget.
    """
    instance = prepare_sign(gpk, usk, cert, rng)
    crs = gpk.crs(SIGN_KIND)
    context = SokContext(crs.fingerprint, bytes(message), instance.rho, instance.compiled.fingerprint)
    proof = nizk_prove(crs, instance.compiled.statement, instance.witness, context, SIGN_ORACLES, rng)
    ots = instance.ots
    unsigned = GroupSignature(instance.rho, instance.c, instance.t, proof, ots.vk, b"")
    signature = GroupSignature(instance.rho, instance.c, instance.t, proof, ots.vk,
                               ots_sign(ots.sk, unsigned.body_bytes()))
    logger.info("Signature produced (%d bytes)", len(signature.to_bytes()))
    return signature


def verify(gpk: GroupPublicKey, message: bytes, sig: GroupSignature) -> bool:
    """OTS signature over (ρ, c, t, π) under vk, then the NIZK against the rebuilt statement."""
    try:
        if not _well_formed(gpk, sig):
            return False
        if not ots_verify(sig.vk, sig.body_bytes(), sig.sig):
            return False
        compiled = _sign_statement(gpk, sig.vk, sig.c, _lwe_matrix(gpk.pp, sig.rho), sig.t)
        crs = gpk.crs(SIGN_KIND)
        context = SokContext(crs.fingerprint, bytes(message), sig.rho, compiled.fingerprint)
        return nizk_verify(crs, compiled.statement, sig.proof, context, SIGN_ORACLES)
    except TraceSigError as e:
        logger.debug("Signature rejected as malformed: %s", e)
        return False


def open_signature(gpk: GroupPublicKey, osk: OpeningKey, message: bytes, sig: GroupSignature) -> Optional[int]:
    """Signer id by decrypting c under the identity key of vk; None for ⊥."""
    if not verify(gpk, message, sig):
        return None
    key = ibe_extract(gpk.B, osk, sig.vk, gpk.pp.sigma_gpv)
    ident = ibe_decrypt(sig.c, key, gpk.pp.N)
    if ident is None:
        logger.warning("Verifying signature did not decrypt to an identity")
    return ident


def _recover_error(kernel: np.ndarray, y: ZqVector, pp: ParamSet) -> Optional[np.ndarray]:
    """Solve Sᵀe = centered(Sᵀy mod q′) over the integers and check ‖e‖∞ ≤ B_lwe."""
    lifted = centered(matvec_mod(reduce(kernel.T, pp.q_prime), y.entries, pp.q_prime), pp.q_prime)
    solution = solve_mod(reduce(kernel.T, RANK_PRIME), reduce(lifted, RANK_PRIME), RANK_PRIME)
    if solution is None:
        return None
    e = centered(solution, RANK_PRIME)
    if not np.array_equal(kernel.T @ e, lifted) or inf_norm(e) > pp.B_lwe:
        return None
    return e


def reveal(gpk: GroupPublicKey, osk: OpeningKey, registry: Registry, ident: int,
           rng: Optional[RngHandle] = None) -> Optional[TracingTrapdoor]:
    """
    Recover x from the registered y = Bᵀx + e with a short kernel basis of B.

    Returns:
        The tracing trapdoor, or None if id is unknown or e/x cannot be recovered.
    """
    pp = gpk.pp
    rng = rng or RngHandle()
    entry = registry.find(ident)
    if entry is None:
        logger.info("Reveal: no member with id %d", ident)
        return None
    y = bin_recompose(entry.ybits, pp.q_prime)
    for attempt in range(1, REVEAL_ATTEMPTS + 1):
        try:
            kernel = sample_kernel_basis(gpk.B, osk.trapdoor, pp.sigma_gpv, rng)
        except SamplingError as e:
            logger.warning("Reveal attempt %d: %s", attempt, e)
            continue
        e = _recover_error(kernel, y, pp)
        if e is None:
            logger.warning("Reveal attempt %d: error vector not recovered", attempt)
            continue
        x = solve_mod(gpk.B.T.entries, np.mod(y.entries - e, pp.q_prime), pp.q_prime)
        if x is None:
            logger.info("Reveal: x is not unique for id %d", ident)
            return None
        logger.info("Revealed tracing trapdoor for member %d", ident)
        return TracingTrapdoor(ZqVector(x, pp.q_prime))
    return None


def trace(gpk: GroupPublicKey, trapdoor: TracingTrapdoor, sig: GroupSignature) -> bool:
    """‖t − H_LWE(ρ)·x mod q′‖∞ ≤ B_lwe."""
    pp = gpk.pp
    try:
        if not _well_formed(gpk, sig) or len(trapdoor.x) != pp.n or trapdoor.x.modulus != pp.q_prime:
            return False
        residual = sig.t - _lwe_matrix(pp, sig.rho).matvec(trapdoor.x)
        return inf_norm(residual.signed()) <= pp.B_lwe
    except TraceSigError as e:
        logger.debug("Trace on malformed input: %s", e)
        return False


def claim(gpk: GroupPublicKey, usk: UserSecret, cert: Certificate, message: bytes, sig: GroupSignature,
          rng: RngHandle) -> Optional[ClaimProof]:
    """
    Prove authorship of Σ; None (⊥) if Σ does not verify or e_t = t − M·x is not short.
    """
    pp = gpk.pp
    if not verify(gpk, message, sig):
        return None
    x = _one_way(gpk, usk.z)
    M = _lwe_matrix(pp, sig.rho)
    e_t = (sig.t - M.matvec(x)).signed()
    if inf_norm(e_t) > pp.B_lwe:
        logger.info("Claim refused: signature was not produced by this member")
        return None
    compiled = _claim_statement(gpk, M, sig.t)
    witness = assemble_witness(compiled, claim_values(pp, z=usk.z.entries, x=x.entries, e_t=e_t))
    crs = gpk.crs(CLAIM_KIND)
    context = SokContext(crs.fingerprint, bytes(message), sig.rho, compiled.fingerprint)
    return ClaimProof(nizk_prove(crs, compiled.statement, witness, context, CLAIM_ORACLES, rng))


def claim_verify(gpk: GroupPublicKey, message: bytes, sig: GroupSignature, proof: ClaimProof) -> bool:
    """Rebuild the claim statement from (gpk, Σ) and check χ."""
    try:
        if not _well_formed(gpk, sig):
            return False
        M = _lwe_matrix(gpk.pp, sig.rho)
        compiled = _claim_statement(gpk, M, sig.t)
        crs = gpk.crs(CLAIM_KIND)
        context = SokContext(crs.fingerprint, bytes(message), sig.rho, compiled.fingerprint)
        return nizk_verify(crs, compiled.statement, proof.chi, context, CLAIM_ORACLES)
    except TraceSigError as e:
        logger.debug("Claim rejected as malformed: %s", e)
        return False


def audit_open(gpk: GroupPublicKey, osk: OpeningKey, registry: Registry, message: bytes,
               sig: GroupSignature) -> AuditResult:
    """Open Σ and cross-check the id against the registry."""
    ident = open_signature(gpk, osk, message, sig)
    if ident is None:
        return AuditResult(None, False)
    transcript = registry.find(ident)
    if transcript is None:
        logger.warning("Opened id %d is not in the registry", ident)
        return AuditResult(ident, False)
    return AuditResult(ident, True, transcript)


def _response_size(pp: ParamSet, n_vars: int, n_triples: int) -> int:
    w = entry_width(pp.q)
    zw = signed_width(np.array([math.ceil(TAIL_CUT * (pp.sigma_2 + pp.p * pp.sigma_1))]))
    return (13 + (pp.l1 + n_vars) * w + 13 + (pp.l1 + n_triples) * w + 32 + 13 + n_vars * w
            + 14 + (pp.l1 + pp.l2 + n_vars) * zw + 14 + (pp.l1 + pp.l2 + n_triples) * zw)


def _proof_size(pp: ParamSet, response: int) -> int:
    per_repetition = 32 + 2 * CHALLENGES_PER_REPETITION + (CHALLENGES_PER_REPETITION + 1) * (5 + response)
    return 8 + 32 + pp.kappa * per_repetition


def size_report(pp: ParamSet, gpk: Optional[GroupPublicKey] = None) -> Dict[str, Any]:
    """Byte accounting of keys, statements, proofs and signatures (estimates unless gpk is given)."""
    n_sign, ell_sign, rows_sign = statement_shape(pp, SIGN_KIND)
    n_claim, ell_claim, rows_claim = statement_shape(pp, CLAIM_KIND)
    sign_response = _response_size(pp, n_sign, ell_sign)
    claim_response = _response_size(pp, n_claim, ell_claim)
    sign_proof = _proof_size(pp, sign_response)
    wp = entry_width(pp.q_prime)
    signature = (5 + pp.rho_bytes + 13 + (pp.m_B + 1) * wp + 13 + pp.m_M * wp + 5 + sign_proof
                 + 5 + HASH_BYTES + 5 + CHAIN_COUNT * HASH_BYTES)
    report: Dict[str, Any] = {
        "sign_statement": {"variables": n_sign, "rows": rows_sign, "triples": ell_sign},
        "claim_statement": {"variables": n_claim, "rows": rows_claim, "triples": ell_claim},
        "sign_response_bytes": sign_response,
        "sign_proof_bytes": sign_proof,
        "sign_hash_bytes": CHALLENGES_PER_REPETITION * pp.kappa * sign_response,
        "claim_response_bytes": claim_response,
        "claim_proof_bytes": _proof_size(pp, claim_response),
        "signature_bytes": signature,
        "usk_bytes": 5 + (pp.m_F + 7) // 8,
    }
    if gpk is not None:
        report["gpk_bytes"] = len(gpk.to_bytes())
    return report
