//! Canonical length-prefixed encoding and hash-to-field.
//!
//! Context tuples and server nonces are digested into field elements of
//! the 254-bit scalar field used by the statement. The encoding prefixes
//! every field with its zero-padded four-digit decimal byte length, which
//! makes it injective over field lists; the digest is SHA-256 reduced
//! modulo the field prime. The module also provides the five operational
//! drift encoders: the deterministic, *wrong* encodings a desynchronized
//! recomputing verifier would produce after a maintenance change.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::Num;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Decimal rendering of the scalar field prime (the alt-bn128 group order).
pub const FIELD_PRIME_DEC: &str =
    "21888242871839275222246405745257275088548364400416034343698204186575808495617";

/// Longest admissible field in a length-prefixed encoding, exclusive.
pub const MAX_FIELD_LEN: usize = 10_000;

/// Nonce byte length issued by the challenge server.
pub const NONCE_LEN: usize = 16;

fn prime() -> &'static BigUint {
    static P: OnceLock<BigUint> = OnceLock::new();
    P.get_or_init(|| BigUint::from_str_radix(FIELD_PRIME_DEC, 10).expect("valid prime literal"))
}

#[derive(Debug, Error, PartialEq)]
pub enum CodecError {
    #[error("field of {0} bytes exceeds the 4-digit length-prefix bound")]
    FieldTooLong(usize),
    #[error("nonce length {0} outside [1, 9999]")]
    NonceLength(usize),
}

/// An element of the 254-bit scalar field, always reduced.
///
/// Serializes as its decimal string so snapshots and table output stay
/// readable and byte-stable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(BigUint);

impl FieldElement {
    pub fn zero() -> Self {
        FieldElement(BigUint::from(0u8))
    }

    pub fn from_u64(v: u64) -> Self {
        FieldElement(BigUint::from(v) % prime())
    }

    /// Embed a signed microdegree coordinate: negative values map to
    /// `p + x`, the standard two's-complement-style field embedding.
    pub fn from_coord(x: i64) -> Self {
        if x >= 0 {
            Self::from_u64(x as u64)
        } else {
            FieldElement(prime() - BigUint::from(x.unsigned_abs()))
        }
    }

    /// Reduce a big-endian byte string modulo the prime.
    pub fn from_bytes_be(bytes: &[u8]) -> Self {
        FieldElement(BigUint::from_bytes_be(bytes) % prime())
    }

    pub fn from_decimal(s: &str) -> Option<Self> {
        let v = BigUint::from_str_radix(s, 10).ok()?;
        (v < *prime()).then_some(FieldElement(v))
    }

    pub fn to_decimal(&self) -> String {
        self.0.to_str_radix(10)
    }

    /// The next element, wrapping at the prime. Used to build
    /// minimally-perturbed public inputs in the tamper experiments.
    pub fn successor(&self) -> Self {
        FieldElement((&self.0 + 1u8) % prime())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe({})", self.to_decimal())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal())
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        FieldElement::from_decimal(&s)
            .ok_or_else(|| D::Error::custom(format!("not a reduced field element: {s}")))
    }
}

/// Concatenate fields, each preceded by its zero-padded four-digit
/// decimal byte length. Injective over field lists.
pub fn lp_encode<T: AsRef<[u8]>>(fields: &[T]) -> Result<Vec<u8>, CodecError> {
    let mut out = Vec::new();
    for f in fields {
        let f = f.as_ref();
        if f.len() >= MAX_FIELD_LEN {
            return Err(CodecError::FieldTooLong(f.len()));
        }
        out.extend_from_slice(format!("{:04}", f.len()).as_bytes());
        out.extend_from_slice(f);
    }
    Ok(out)
}

/// `H(x) = SHA-256(x) mod p`, big-endian digest interpretation.
pub fn hash_to_field(data: &[u8]) -> FieldElement {
    FieldElement::from_bytes_be(&Sha256::digest(data))
}

/// The application context a proof binds to: which drop, under which
/// policy revision, during which epoch.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContextTuple {
    pub drop_id: String,
    pub policy_version: String,
    pub epoch: u64,
}

impl ContextTuple {
    pub fn new(drop_id: impl Into<String>, policy_version: impl Into<String>, epoch: u64) -> Self {
        Self {
            drop_id: drop_id.into(),
            policy_version: policy_version.into(),
            epoch,
        }
    }

    /// Canonical encoding: length-prefixed (drop_id, policy_version,
    /// minimal-decimal epoch).
    pub fn encode(&self) -> Result<Vec<u8>, CodecError> {
        lp_encode(&[
            self.drop_id.as_bytes(),
            self.policy_version.as_bytes(),
            self.epoch.to_string().as_bytes(),
        ])
    }

    pub fn digest(&self) -> Result<FieldElement, CodecError> {
        Ok(hash_to_field(&self.encode()?))
    }
}

/// `C = H(LP(drop_id, policy_version, epoch))`.
pub fn context_digest(ctx: &ContextTuple) -> Result<FieldElement, CodecError> {
    ctx.digest()
}

/// A server-issued challenge nonce (16 bytes unless stated otherwise).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Nonce {
    bytes: Vec<u8>,
}

impl Nonce {
    pub fn new(bytes: Vec<u8>) -> Result<Self, CodecError> {
        if bytes.is_empty() || bytes.len() >= MAX_FIELD_LEN {
            return Err(CodecError::NonceLength(bytes.len()));
        }
        Ok(Self { bytes })
    }

    pub fn from_array(bytes: [u8; NONCE_LEN]) -> Self {
        Self { bytes: bytes.to_vec() }
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    /// `N = H(server_nonce)`, hashing the raw bytes.
    pub fn digest(&self) -> FieldElement {
        hash_to_field(&self.bytes)
    }
}

/// `N = H(server_nonce)`.
pub fn challenge_digest(nonce: &Nonce) -> FieldElement {
    nonce.digest()
}

/// The five maintenance-induced desynchronization variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DriftId {
    /// Separator-joined context fields instead of length prefixes.
    D1,
    /// Context fields reordered to (policy_version, drop_id, epoch).
    D2,
    /// Epoch off by one.
    D3,
    /// Policy version rendered with a "v" prefix.
    D4,
    /// Nonce hex-rendered before hashing.
    D5,
}

impl DriftId {
    pub const ALL: [DriftId; 5] = [DriftId::D1, DriftId::D2, DriftId::D3, DriftId::D4, DriftId::D5];

    pub fn label(self) -> &'static str {
        match self {
            DriftId::D1 => "D1",
            DriftId::D2 => "D2",
            DriftId::D3 => "D3",
            DriftId::D4 => "D4",
            DriftId::D5 => "D5",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            DriftId::D1 => "separator-joined encoding",
            DriftId::D2 => "field order swapped",
            DriftId::D3 => "epoch off-by-one",
            DriftId::D4 => "policy version prefixed",
            DriftId::D5 => "nonce hex-rendered",
        }
    }
}

/// The (context encoding, nonce encoding) a desynchronized recomputing
/// verifier would feed to the hash under the given drift variant. Exactly
/// one of the two sides deviates from the canonical encoding per variant.
pub fn drift_encode(
    variant: DriftId,
    ctx: &ContextTuple,
    nonce: &Nonce,
) -> Result<(Vec<u8>, Vec<u8>), CodecError> {
    let ctx_enc = match variant {
        DriftId::D1 => {
            let mut out = Vec::new();
            out.extend_from_slice(ctx.drop_id.as_bytes());
            out.push(b'|');
            out.extend_from_slice(ctx.policy_version.as_bytes());
            out.push(b'|');
            out.extend_from_slice(ctx.epoch.to_string().as_bytes());
            out
        }
        DriftId::D2 => lp_encode(&[
            ctx.policy_version.as_bytes(),
            ctx.drop_id.as_bytes(),
            ctx.epoch.to_string().as_bytes(),
        ])?,
        DriftId::D3 => lp_encode(&[
            ctx.drop_id.as_bytes(),
            ctx.policy_version.as_bytes(),
            (ctx.epoch + 1).to_string().as_bytes(),
        ])?,
        DriftId::D4 => lp_encode(&[
            ctx.drop_id.as_bytes(),
            format!("v{}", ctx.policy_version).as_bytes(),
            ctx.epoch.to_string().as_bytes(),
        ])?,
        DriftId::D5 => ctx.encode()?,
    };
    let nonce_enc = match variant {
        DriftId::D5 => nonce.to_hex().into_bytes(),
        _ => nonce.bytes().to_vec(),
    };
    Ok((ctx_enc, nonce_enc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn lp_encode_worked_example() {
        let enc = lp_encode(&["drop-42", "2", "7"]).unwrap();
        assert_eq!(enc, b"0007drop-420001200017");
        assert_eq!(lp_encode(&[""]).unwrap(), b"0000");
        assert_eq!(lp_encode(&["a", "bc"]).unwrap(), b"0001a0002bc");
        let empty: [&str; 0] = [];
        assert_eq!(lp_encode(&empty).unwrap(), b"");
    }

    #[test]
    fn lp_encode_rejects_oversized_fields() {
        let big = vec![b'x'; MAX_FIELD_LEN];
        assert_eq!(lp_encode(&[big.as_slice()]), Err(CodecError::FieldTooLong(MAX_FIELD_LEN)));
        let just_fits = vec![b'x'; MAX_FIELD_LEN - 1];
        assert!(lp_encode(&[just_fits.as_slice()]).is_ok());
    }

    #[test]
    fn lp_encode_separates_shifted_boundaries() {
        assert_ne!(lp_encode(&["ab", "c"]).unwrap(), lp_encode(&["a", "bc"]).unwrap());
        assert_ne!(lp_encode(&["ab"]).unwrap(), lp_encode(&["a", "b"]).unwrap());
    }

    #[test]
    fn hash_to_field_pinned_values() {
        // Frozen against an independent SHA-256 + bignum oracle.
        assert_eq!(
            hash_to_field(b"").to_decimal(),
            "15434364762196996140549589341552222435606443046533897618586580254812431104081"
        );
        assert_eq!(
            hash_to_field(b"0007drop-420001200017").to_decimal(),
            "14330783819081237646687777977546828947004382693829145531886323905530572440890"
        );
    }

    #[test]
    fn context_digest_pinned_value() {
        let ctx = ContextTuple::new("drop-42", "2", 7);
        assert_eq!(
            ctx.digest().unwrap().to_decimal(),
            "14330783819081237646687777977546828947004382693829145531886323905530572440890"
        );
        assert_eq!(ctx.digest().unwrap(), ctx.digest().unwrap());
    }

    #[test]
    fn challenge_digest_pinned_value() {
        let nonce = Nonce::from_array([0u8; NONCE_LEN]);
        assert_eq!(
            nonce.digest().to_decimal(),
            "3114472056655691049501569411100406603702767780818681331965816627329674000314"
        );
    }

    #[test]
    fn nonce_length_bounds() {
        assert_eq!(Nonce::new(vec![]).unwrap_err(), CodecError::NonceLength(0));
        assert_eq!(
            Nonce::new(vec![0u8; MAX_FIELD_LEN]).unwrap_err(),
            CodecError::NonceLength(MAX_FIELD_LEN)
        );
        assert!(Nonce::new(vec![0u8; 1]).is_ok());
    }

    #[test]
    fn field_element_coord_embedding() {
        assert_eq!(FieldElement::from_coord(7).to_decimal(), "7");
        let neg = FieldElement::from_coord(-1);
        assert_eq!(
            neg.to_decimal(),
            "21888242871839275222246405745257275088548364400416034343698204186575808495616"
        );
        assert_eq!(neg.successor().to_decimal(), "0");
    }

    #[test]
    fn field_element_serde_is_decimal() {
        let fe = FieldElement::from_u64(12345);
        let json = serde_json::to_string(&fe).unwrap();
        assert_eq!(json, "\"12345\"");
        let back: FieldElement = serde_json::from_str(&json).unwrap();
        assert_eq!(back, fe);
        assert!(serde_json::from_str::<FieldElement>(&format!("\"{FIELD_PRIME_DEC}\"")).is_err());
    }

    #[test]
    fn drift_worked_examples() {
        let ctx = ContextTuple::new("drop-42", "2", 7);
        let nonce = Nonce::from_array([0u8; NONCE_LEN]);
        let (c1, n1) = drift_encode(DriftId::D1, &ctx, &nonce).unwrap();
        assert_eq!(c1, b"drop-42|2|7");
        assert_eq!(n1, nonce.bytes());
        let (c3, _) = drift_encode(DriftId::D3, &ctx, &nonce).unwrap();
        assert_eq!(c3, b"0007drop-420001200018");
        let (c4, _) = drift_encode(DriftId::D4, &ctx, &nonce).unwrap();
        assert_eq!(c4, b"0007drop-420002v200017");
        let (c5, n5) = drift_encode(DriftId::D5, &ctx, &nonce).unwrap();
        assert_eq!(c5, ctx.encode().unwrap());
        assert_eq!(n5, b"00000000000000000000000000000000");
    }

    #[test]
    fn digest_corpus_has_no_collisions() {
        // 100k deterministically generated tuples; every context digest and
        // every nonce digest distinct.
        let mut ctx_digests = BTreeSet::new();
        let mut nonce_digests = BTreeSet::new();
        for i in 0u32..100_000 {
            let stream = Sha256::digest(format!("corpus-{i}").as_bytes());
            let ctx = ContextTuple::new(
                format!("drop-{}", hex::encode(&stream[..6])),
                format!("{}", stream[6] % 10),
                u64::from(stream[7]) * 251 + u64::from(stream[8]),
            );
            assert!(ctx_digests.insert(ctx.digest().unwrap()), "collision at tuple {i}");
            let nonce = Nonce::new(stream[9..25].to_vec()).unwrap();
            assert!(nonce_digests.insert(nonce.digest()), "collision at nonce {i}");
        }
        assert_eq!(ctx_digests.len(), 100_000);
        assert_eq!(nonce_digests.len(), 100_000);
    }

    fn field_string() -> impl Strategy<Value = String> {
        proptest::string::string_regex("[a-z0-9-]{0,12}").unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 512, ..ProptestConfig::default() })]

        /// Distinct field lists encode to distinct byte strings.
        #[test]
        fn lp_encode_injective(
            a in proptest::collection::vec(field_string(), 0..4),
            b in proptest::collection::vec(field_string(), 0..4),
        ) {
            let enc_a = lp_encode(&a).unwrap();
            let enc_b = lp_encode(&b).unwrap();
            prop_assert_eq!(a == b, enc_a == enc_b);
        }

        /// The reduction postcondition: every output is below the prime.
        #[test]
        fn hash_to_field_below_prime(data in proptest::collection::vec(any::<u8>(), 0..64)) {
            let fe = hash_to_field(&data);
            prop_assert!(FieldElement::from_decimal(&fe.to_decimal()).is_some());
        }

        /// Every drift variant deviates from the canonical encoding pair.
        /// D2 only swaps fields, so it needs the two swapped fields to
        /// differ; the others deviate structurally on any input.
        #[test]
        fn drift_differs_from_canonical(
            drop_id in field_string(),
            pv in field_string(),
            epoch in 0u64..1_000_000,
            nonce_bytes in proptest::collection::vec(any::<u8>(), 1..64),
            variant_idx in 0usize..5,
        ) {
            let variant = DriftId::ALL[variant_idx];
            prop_assume!(variant != DriftId::D2 || drop_id != pv);
            let ctx = ContextTuple::new(drop_id, pv, epoch);
            let nonce = Nonce::new(nonce_bytes).unwrap();
            let canonical = (ctx.encode().unwrap(), nonce.bytes().to_vec());
            let drifted = drift_encode(variant, &ctx, &nonce).unwrap();
            prop_assert_ne!(drifted, canonical);
        }
    }
}
