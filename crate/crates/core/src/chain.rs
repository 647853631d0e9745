// SPDX-License-Identifier: Apache-2.0

//! Consortium chain simulator whose blocks are validated by threshold
//! recovery of a block secret.
//!
//! Each block interval gathers transactions, forms a committee of dealers
//! from the transacting nodes, checks each dealer's commitment to its own
//! transactions, encodes the interval's statistics into a secret vector and
//! shares it with `m` randomly chosen nodes using the multisecret scheme with
//! `t = ceil(m/2)`. A recovered secret that matches the public transaction
//! data validates the block. If recovery does not conclude, the block is
//! still formed but carries a `timeout_validated` flag.
//!
//! Blocks are sealed with a proof-of-work nonce and kept in a fork-aware
//! store that follows the longest chain, ties going to the first block seen.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use sha2::{Digest as _, Sha256};
use thiserror::Error;

use crate::error::Error;
use crate::field::{FieldElement, PrimeField};
use crate::mss::SecretVector;
use crate::oneway::{OneWayFn, OneWayKind};
use crate::protocol::{
    identify_cheaters, run_session, AbortReason, ActorId, Behavior, Outcome, Payload,
    ProtocolError, Recipient, RecoveredValues, Role, SecretInput, SessionConfig, SessionRun,
    Transcript, DEFAULT_TICK_BUDGET,
};
use crate::sss::{SchemeParams, VerificationMode};
use crate::{seeded_rng, SeededRng};

pub type Hash32 = [u8; 32];

/// Parent hash of height-1 blocks.
pub const GENESIS_HASH: Hash32 = [0u8; 32];
pub const BLOCK_VERSION: u32 = 1;
pub const DEFAULT_NBITS: u32 = 8;
pub const DEFAULT_MAX_NONCE: u64 = 1 << 24;
const MIN_BLOCK_PRIME_BITS: u64 = 17;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("no transactions in the interval")]
    NoTransactions,
    #[error("committee collapsed to {remaining} dealers (minimum {min})")]
    CommitteeCollapse { remaining: usize, min: usize },
    #[error("prime field is too small to encode block secrets (need p >= 2^16)")]
    FieldTooSmall,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("block has no transactions")]
    EmptyBlock,
    #[error("no nonce below {bound} meets {nbits} leading zero bits")]
    DifficultyTooHigh { nbits: u32, bound: u64 },
    #[error("block secret was not validated against the transactions")]
    SecretNotValidated,
    #[error("parent block {0} is unknown")]
    OrphanParent(String),
    #[error("header hash does not meet the difficulty target")]
    InvalidPoW,
    #[error("merkle root does not match the transactions")]
    MerkleMismatch,
    #[error("height {got} does not follow parent height (expected {expected})")]
    HeightMismatch { expected: u64, got: u64 },
    #[error("block {0} is already stored")]
    DuplicateBlock(String),
    #[error("corrupt chain store: {0}")]
    CorruptStore(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Scheme(#[from] Error),
}

pub type ChainResult<T> = Result<T, ChainError>;

fn sha256(data: &[u8]) -> Hash32 {
    Sha256::digest(data).into()
}

pub fn leading_zero_bits(hash: &Hash32) -> u32 {
    let mut bits = 0;
    for byte in hash {
        if *byte == 0 {
            bits += 8;
        } else {
            bits += byte.leading_zeros();
            break;
        }
    }
    bits
}

pub type NodeId = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transaction {
    pub tx_id: String,
    pub from_node: NodeId,
    pub to_node: NodeId,
    pub amount: u64,
    pub timestamp_tick: u64,
}

impl Transaction {
    /// `len(tx_id) || tx_id || from || to || amount || timestamp`, big-endian.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(28 + self.tx_id.len());
        put_bytes(&mut out, self.tx_id.as_bytes());
        out.extend_from_slice(&self.from_node.to_be_bytes());
        out.extend_from_slice(&self.to_node.to_be_bytes());
        out.extend_from_slice(&self.amount.to_be_bytes());
        out.extend_from_slice(&self.timestamp_tick.to_be_bytes());
        out
    }

    fn involves(&self, node: NodeId) -> bool {
        self.from_node == node || self.to_node == node
    }
}

fn put_bytes(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(bytes);
}

/// Binary Merkle tree over SHA-256 leaf digests of the transactions. A lone
/// node is hashed once more to form the root; odd layers repeat their last
/// node.
pub fn merkle_root(transactions: &[Transaction]) -> ChainResult<Hash32> {
    if transactions.is_empty() {
        return Err(ChainError::EmptyBlock);
    }
    let mut layer: Vec<Hash32> = transactions
        .iter()
        .map(|tx| sha256(&tx.canonical_bytes()))
        .collect();
    if layer.len() == 1 {
        return Ok(sha256(&layer[0]));
    }
    while layer.len() > 1 {
        layer = layer
            .chunks(2)
            .map(|pair| {
                let right = pair.get(1).unwrap_or(&pair[0]);
                let mut joined = [0u8; 64];
                joined[..32].copy_from_slice(&pair[0]);
                joined[32..].copy_from_slice(right);
                sha256(&joined)
            })
            .collect();
    }
    Ok(layer[0])
}

/// The five statistics a block secret encodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSecretInput {
    pub n_trans: u64,
    pub n_peop: u64,
    pub t_concat: String,
    pub a_deb: u128,
    pub a_cred: u128,
}

impl BlockSecretInput {
    pub fn from_transactions(transactions: &[Transaction]) -> Self {
        let people: BTreeSet<NodeId> = transactions
            .iter()
            .flat_map(|tx| [tx.from_node, tx.to_node])
            .collect();
        BlockSecretInput {
            n_trans: transactions.len() as u64,
            n_peop: people.len() as u64,
            t_concat: transactions.iter().map(|tx| tx.tx_id.as_str()).collect(),
            a_deb: transactions.iter().map(|tx| u128::from(tx.amount)).sum(),
            a_cred: transactions.iter().map(|tx| u128::from(tx.amount)).sum(),
        }
    }

    fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.n_trans.to_be_bytes());
        out.extend_from_slice(&self.n_peop.to_be_bytes());
        put_bytes(&mut out, self.t_concat.as_bytes());
        out.extend_from_slice(&self.a_deb.to_be_bytes());
        out.extend_from_slice(&self.a_cred.to_be_bytes());
        out
    }
}

/// `ceil(m/2)`, at least 2.
pub fn majority_threshold(m: usize) -> usize {
    m.div_ceil(2).max(2)
}

/// Encodes the interval statistics as an `m`-component secret whose first
/// `t` components are message and the rest parity.
///
/// Message component `i` is `SHA-256(tag || input || i) mod p`. Parity
/// component `j` (1-based, `j > t`) is `sum_{i=1..t} (j^i mod p) * s_i`.
pub fn encode_block_secret(
    input: &BlockSecretInput,
    m: usize,
    t: usize,
    field: &PrimeField,
) -> ChainResult<SecretVector> {
    if field.modulus().bits() < MIN_BLOCK_PRIME_BITS {
        return Err(ChainError::FieldTooSmall);
    }
    if input.a_deb != input.a_cred {
        return Err(ChainError::Precondition(
            "debited and credited totals differ".into(),
        ));
    }
    if input.n_peop > 2 * input.n_trans {
        return Err(ChainError::Precondition(
            "more people than transaction endpoints".into(),
        ));
    }
    if t < 2 || t >= m {
        return Err(ChainError::Precondition(format!(
            "need 2 <= t < m, got t={t}, m={m}"
        )));
    }
    let bytes = input.canonical_bytes();
    let mut components: Vec<FieldElement> = (0..t as u32)
        .map(|i| {
            let mut h = Sha256::new();
            h.update(b"tlss/block-secret/v1");
            h.update(&bytes);
            h.update(i.to_be_bytes());
            field.element(BigUint::from_bytes_be(&h.finalize()))
        })
        .collect();
    for j in (t + 1)..=m {
        let base = field.element(j as u64);
        let mut weight = base.clone();
        let mut parity = field.zero();
        for s in &components[..t] {
            parity = &parity + &(&weight * s);
            weight = &weight * &base;
        }
        components.push(parity);
    }
    Ok(SecretVector::new(components, t)?)
}

/// Digest of secret components, each as fixed-width big-endian bytes.
pub fn secret_digest(components: &[FieldElement]) -> Hash32 {
    let mut h = Sha256::new();
    for c in components {
        let width = c.field().byte_len();
        let bytes = c.to_bytes_be();
        h.update(vec![0u8; width - bytes.len()]);
        h.update(&bytes);
    }
    h.finalize().into()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValidationMode {
    Recovered,
    TimeoutValidated,
}

/// A block secret that may be sealed into a header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidatedSecret {
    digest: Hash32,
    mode: ValidationMode,
}

impl ValidatedSecret {
    /// Checks recovered message components, and the public total `s~`
    /// (which covers the parity components), against a fresh encoding of
    /// the transactions.
    pub fn from_recovery(
        message: &[FieldElement],
        s_tilde: &FieldElement,
        transactions: &[Transaction],
        m: usize,
        t: usize,
        field: &PrimeField,
    ) -> ChainResult<Self> {
        let expected = encode_block_secret(
            &BlockSecretInput::from_transactions(transactions),
            m,
            t,
            field,
        )?;
        let total = expected
            .components()
            .iter()
            .fold(field.zero(), |acc, c| &acc + c);
        if message != expected.message() || s_tilde != &total {
            return Err(ChainError::SecretNotValidated);
        }
        Ok(ValidatedSecret {
            digest: secret_digest(message),
            mode: ValidationMode::Recovered,
        })
    }

    /// Validation by expiry of the recovery window.
    pub fn timeout() -> Self {
        ValidatedSecret {
            digest: [0u8; 32],
            mode: ValidationMode::TimeoutValidated,
        }
    }

    pub fn mode(&self) -> ValidationMode {
        self.mode
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockHeader {
    pub version: u32,
    pub merkle_root: Hash32,
    pub timestamp_tick: u64,
    pub nbits: u32,
    pub nonce: u64,
    pub parent_hash: Hash32,
    /// Digest of the recovered block secret.
    pub secret_digest: Hash32,
    pub timeout_validated: bool,
}

const HEADER_LEN: usize = 4 + 8 + 4 + 8 + 1 + 32 * 3;

impl BlockHeader {
    /// Integers big-endian in order (version, timestamp, nbits, nonce,
    /// timeout flag), then Merkle root, parent hash and secret digest.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN);
        out.extend_from_slice(&self.version.to_be_bytes());
        out.extend_from_slice(&self.timestamp_tick.to_be_bytes());
        out.extend_from_slice(&self.nbits.to_be_bytes());
        out.extend_from_slice(&self.nonce.to_be_bytes());
        out.push(u8::from(self.timeout_validated));
        out.extend_from_slice(&self.merkle_root);
        out.extend_from_slice(&self.parent_hash);
        out.extend_from_slice(&self.secret_digest);
        out
    }

    pub fn hash(&self) -> Hash32 {
        sha256(&self.canonical_bytes())
    }

    pub fn meets_difficulty(&self) -> bool {
        leading_zero_bits(&self.hash()) >= self.nbits
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub header: BlockHeader,
    pub transactions: Vec<Transaction>,
    pub height: u64,
}

impl Block {
    pub fn hash(&self) -> Hash32 {
        self.header.hash()
    }

    pub fn timeout_validated(&self) -> bool {
        self.header.timeout_validated
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = self.header.canonical_bytes();
        out.extend_from_slice(&self.height.to_be_bytes());
        out.extend_from_slice(&(self.transactions.len() as u32).to_be_bytes());
        for tx in &self.transactions {
            out.extend_from_slice(&tx.canonical_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> ChainResult<Self> {
        let mut r = Reader { bytes, pos: 0 };
        let version = r.u32()?;
        let timestamp_tick = r.u64()?;
        let nbits = r.u32()?;
        let nonce = r.u64()?;
        let timeout_validated = match r.take(1)?[0] {
            0 => false,
            1 => true,
            other => {
                return Err(ChainError::CorruptStore(format!(
                    "bad validation flag {other}"
                )))
            }
        };
        let merkle_root = r.hash()?;
        let parent_hash = r.hash()?;
        let secret_digest = r.hash()?;
        let height = r.u64()?;
        let count = r.u32()? as usize;
        let mut transactions = Vec::with_capacity(count.min(1 << 16));
        for _ in 0..count {
            let len = r.u32()? as usize;
            let tx_id = String::from_utf8(r.take(len)?.to_vec())
                .map_err(|_| ChainError::CorruptStore("transaction id is not UTF-8".into()))?;
            transactions.push(Transaction {
                tx_id,
                from_node: r.u32()?,
                to_node: r.u32()?,
                amount: r.u64()?,
                timestamp_tick: r.u64()?,
            });
        }
        if r.pos != bytes.len() {
            return Err(ChainError::CorruptStore(
                "trailing bytes in block record".into(),
            ));
        }
        Ok(Block {
            header: BlockHeader {
                version,
                merkle_root,
                timestamp_tick,
                nbits,
                nonce,
                parent_hash,
                secret_digest,
                timeout_validated,
            },
            transactions,
            height,
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> ChainResult<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| ChainError::CorruptStore("record truncated".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> ChainResult<u32> {
        Ok(u32::from_be_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }

    fn u64(&mut self) -> ChainResult<u64> {
        Ok(u64::from_be_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    fn hash(&mut self) -> ChainResult<Hash32> {
        Ok(self.take(32)?.try_into().expect("32 bytes"))
    }
}

/// Parent of the block being mined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParentRef {
    pub hash: Hash32,
    pub height: u64,
}

impl ParentRef {
    pub fn genesis() -> Self {
        ParentRef {
            hash: GENESIS_HASH,
            height: 0,
        }
    }
}

/// Assembles a header and searches nonces upward from 0.
pub fn mine_block(
    parent: ParentRef,
    transactions: Vec<Transaction>,
    secret: &ValidatedSecret,
    nbits: u32,
    timestamp_tick: u64,
    max_nonce: u64,
) -> ChainResult<Block> {
    let mut header = BlockHeader {
        version: BLOCK_VERSION,
        merkle_root: merkle_root(&transactions)?,
        timestamp_tick,
        nbits,
        nonce: 0,
        parent_hash: parent.hash,
        secret_digest: secret.digest,
        timeout_validated: secret.mode == ValidationMode::TimeoutValidated,
    };
    if nbits > 256 {
        return Err(ChainError::DifficultyTooHigh {
            nbits,
            bound: max_nonce,
        });
    }
    while !header.meets_difficulty() {
        if header.nonce >= max_nonce {
            return Err(ChainError::DifficultyTooHigh {
                nbits,
                bound: max_nonce,
            });
        }
        header.nonce += 1;
    }
    Ok(Block {
        header,
        transactions,
        height: parent.height + 1,
    })
}

/// Checks a block against its own contents: PoW and Merkle root.
fn check_block_contents(block: &Block) -> ChainResult<()> {
    if !block.header.meets_difficulty() {
        return Err(ChainError::InvalidPoW);
    }
    if merkle_root(&block.transactions).ok() != Some(block.header.merkle_root) {
        return Err(ChainError::MerkleMismatch);
    }
    Ok(())
}

/// Fork-aware block storage following the longest chain.
#[derive(Clone, Debug, Default)]
pub struct ChainStore {
    blocks: BTreeMap<Hash32, Block>,
    children: BTreeMap<Hash32, Vec<Hash32>>,
    order: Vec<Hash32>,
    tip: Option<Hash32>,
}

impl ChainStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn get(&self, hash: &Hash32) -> Option<&Block> {
        self.blocks.get(hash)
    }

    pub fn tip_hash(&self) -> Hash32 {
        self.tip.unwrap_or(GENESIS_HASH)
    }

    pub fn tip_height(&self) -> u64 {
        self.tip
            .and_then(|h| self.blocks.get(&h))
            .map_or(0, |b| b.height)
    }

    pub fn tip(&self) -> ParentRef {
        ParentRef {
            hash: self.tip_hash(),
            height: self.tip_height(),
        }
    }

    /// Blocks in the order they were first stored.
    pub fn blocks_in_order(&self) -> impl Iterator<Item = &Block> {
        self.order.iter().map(|h| &self.blocks[h])
    }

    fn parent_height(&self, parent: &Hash32) -> Option<u64> {
        if *parent == GENESIS_HASH {
            Some(0)
        } else {
            self.blocks.get(parent).map(|b| b.height)
        }
    }

    /// Validates and stores `block`; returns the (possibly unchanged) tip.
    pub fn append_block(&mut self, block: Block) -> ChainResult<Hash32> {
        let parent_height = self
            .parent_height(&block.header.parent_hash)
            .ok_or_else(|| ChainError::OrphanParent(hex::encode(block.header.parent_hash)))?;
        if block.height != parent_height + 1 {
            return Err(ChainError::HeightMismatch {
                expected: parent_height + 1,
                got: block.height,
            });
        }
        check_block_contents(&block)?;
        let hash = block.hash();
        if self.blocks.contains_key(&hash) {
            return Err(ChainError::DuplicateBlock(hex::encode(hash)));
        }
        self.insert_unchecked(block);
        Ok(self.tip_hash())
    }

    fn insert_unchecked(&mut self, block: Block) {
        let hash = block.hash();
        if block.height > self.tip_height() {
            self.tip = Some(hash);
        }
        self.children
            .entry(block.header.parent_hash)
            .or_default()
            .push(hash);
        self.order.push(hash);
        self.blocks.insert(hash, block);
    }

    /// Length-prefixed canonical records in insertion order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for block in self.blocks_in_order() {
            put_bytes(&mut out, &block.canonical_bytes());
        }
        out
    }

    /// Loads records without validating them; see [`validate_chain`].
    pub fn from_bytes(bytes: &[u8]) -> ChainResult<Self> {
        let mut store = ChainStore::new();
        let mut r = Reader { bytes, pos: 0 };
        while r.pos < bytes.len() {
            let len = r.u32()? as usize;
            let block = Block::from_bytes(r.take(len)?)?;
            if store.blocks.contains_key(&block.hash()) {
                return Err(ChainError::CorruptStore("duplicate block record".into()));
            }
            store.insert_unchecked(block);
        }
        Ok(store)
    }

    pub fn save(&self, path: &Path) -> ChainResult<()> {
        fs::write(path, self.to_bytes()).map_err(|e| ChainError::Io(e.to_string()))
    }

    pub fn load(path: &Path) -> ChainResult<Self> {
        let bytes =
            fs::read(path).map_err(|e| ChainError::Io(format!("{}: {e}", path.display())))?;
        Self::from_bytes(&bytes)
    }

    /// Appends one record to a store file.
    pub fn append_record(path: &Path, block: &Block) -> ChainResult<()> {
        let mut record = Vec::new();
        put_bytes(&mut record, &block.canonical_bytes());
        fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .and_then(|mut f| f.write_all(&record))
            .map_err(|e| ChainError::Io(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockStatus {
    Valid,
    Invalid(ChainError),
    /// An ancestor failed validation.
    DescendantOfInvalid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockReport {
    pub hash: Hash32,
    pub height: u64,
    pub timeout_validated: bool,
    pub status: BlockStatus,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChainReport {
    pub entries: Vec<BlockReport>,
}

impl ChainReport {
    pub fn is_clean(&self) -> bool {
        self.entries.iter().all(|e| e.status == BlockStatus::Valid)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BlockReport> {
        self.entries
            .iter()
            .filter(|e| e.status != BlockStatus::Valid)
    }
}

/// Walks every branch from genesis, checking parent links, heights, PoW and
/// Merkle roots. Descendants of a failing block are reported as such.
pub fn validate_chain(store: &ChainStore) -> ChainReport {
    let mut entries = Vec::new();
    let mut seen = BTreeSet::new();
    // (hash, parent height, ancestor invalid)
    let mut stack: Vec<(Hash32, u64, bool)> = store
        .children
        .get(&GENESIS_HASH)
        .into_iter()
        .flatten()
        .rev()
        .map(|h| (*h, 0, false))
        .collect();
    while let Some((hash, parent_height, tainted)) = stack.pop() {
        let block = &store.blocks[&hash];
        seen.insert(hash);
        let status = if tainted {
            BlockStatus::DescendantOfInvalid
        } else if block.height != parent_height + 1 {
            BlockStatus::Invalid(ChainError::HeightMismatch {
                expected: parent_height + 1,
                got: block.height,
            })
        } else {
            match check_block_contents(block) {
                Ok(()) => BlockStatus::Valid,
                Err(e) => BlockStatus::Invalid(e),
            }
        };
        let bad = status != BlockStatus::Valid;
        entries.push(BlockReport {
            hash,
            height: block.height,
            timeout_validated: block.timeout_validated(),
            status,
        });
        for child in store.children.get(&hash).into_iter().flatten().rev() {
            stack.push((*child, block.height, bad));
        }
    }
    for hash in &store.order {
        if !seen.contains(hash) {
            let block = &store.blocks[hash];
            entries.push(BlockReport {
                hash: *hash,
                height: block.height,
                timeout_validated: block.timeout_validated(),
                status: BlockStatus::Invalid(ChainError::OrphanParent(hex::encode(
                    block.header.parent_hash,
                ))),
            });
        }
    }
    ChainReport { entries }
}

/// Distinct transacting nodes, clipped to `[min_size, max_size]`.
///
/// Overflow keeps a seeded sample; underflow pads with a seeded draw from
/// `population` nodes that did not transact.
pub fn committee_form<R: Rng + ?Sized>(
    transactions: &[Transaction],
    min_size: usize,
    max_size: usize,
    population: &[NodeId],
    rng: &mut R,
) -> ChainResult<Vec<NodeId>> {
    if transactions.is_empty() {
        return Err(ChainError::NoTransactions);
    }
    if min_size > max_size {
        return Err(ChainError::Precondition(format!(
            "committee minimum {min_size} exceeds maximum {max_size}"
        )));
    }
    let transactors: Vec<NodeId> = transactions
        .iter()
        .flat_map(|tx| [tx.from_node, tx.to_node])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut committee: Vec<NodeId> = if transactors.len() > max_size {
        transactors
            .choose_multiple(rng, max_size)
            .copied()
            .collect()
    } else {
        transactors.clone()
    };
    if committee.len() < min_size {
        let idle: Vec<NodeId> = population
            .iter()
            .copied()
            .filter(|n| !transactors.contains(n))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let need = min_size - committee.len();
        if idle.len() < need {
            return Err(ChainError::CommitteeCollapse {
                remaining: committee.len() + idle.len(),
                min: min_size,
            });
        }
        committee.extend(idle.choose_multiple(rng, need).copied());
    }
    committee.sort_unstable();
    Ok(committee)
}

/// What a dealer should publish: a digest of every transaction it is part of.
pub fn dealer_commitment(dealer: NodeId, transactions: &[Transaction]) -> Hash32 {
    let mut h = Sha256::new();
    h.update(b"tlss/dealer-commitment/v1");
    h.update(dealer.to_be_bytes());
    for tx in transactions.iter().filter(|tx| tx.involves(dealer)) {
        h.update(tx.canonical_bytes());
    }
    h.finalize().into()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttestationReport {
    pub passed: Vec<NodeId>,
    pub evicted: Vec<NodeId>,
}

/// Evicts dealers whose commitment does not match their transactions.
pub fn attest_committee(
    committee: &[NodeId],
    transactions: &[Transaction],
    commitments: &BTreeMap<NodeId, Hash32>,
    min_size: usize,
) -> ChainResult<AttestationReport> {
    let (passed, evicted): (Vec<NodeId>, Vec<NodeId>) = committee
        .iter()
        .partition(|&&d| commitments.get(&d) == Some(&dealer_commitment(d, transactions)));
    if passed.len() < min_size {
        return Err(ChainError::CommitteeCollapse {
            remaining: passed.len(),
            min: min_size,
        });
    }
    Ok(AttestationReport { passed, evicted })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DealerBehavior {
    #[default]
    Honest,
    /// Commits to its transactions with one amount altered.
    ForgeCommitment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct NodeProfile {
    pub share: Behavior,
    pub dealer: DealerBehavior,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorldConfig {
    pub node_count: u32,
    pub profiles: BTreeMap<NodeId, NodeProfile>,
    pub committee_min: usize,
    pub committee_max: usize,
    /// Number of share recipients per block.
    pub recipients: usize,
    pub nbits: u32,
    /// Ticks between blocks.
    pub tau0: u64,
    /// Recovery budget per block, in ticks.
    pub tau1: u64,
    pub prime: BigUint,
    pub oneway: OneWayKind,
    pub seed: u64,
    pub txs_per_interval: usize,
    pub max_amount: u64,
    pub mode: VerificationMode,
    pub max_nonce: u64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            node_count: 100,
            profiles: BTreeMap::new(),
            committee_min: 4,
            committee_max: 32,
            recipients: 10,
            nbits: DEFAULT_NBITS,
            tau0: 600,
            tau1: DEFAULT_TICK_BUDGET,
            prime: BigUint::from((1u64 << 61) - 1),
            oneway: OneWayKind::Sha256,
            seed: 0,
            txs_per_interval: 20,
            max_amount: 1_000,
            mode: VerificationMode::Strict,
            max_nonce: DEFAULT_MAX_NONCE,
        }
    }
}

/// Summary of one recovery attempt within an interval.
#[derive(Clone, Debug)]
pub struct AttemptSummary {
    pub outcome: Outcome,
    pub cheaters: Vec<NodeId>,
    pub consistent_submissions: usize,
    pub ticks: u64,
    pub run: SessionRun,
}

#[derive(Clone, Debug)]
pub struct BlockOutcome {
    pub interval: u64,
    pub height: u64,
    pub block_hash: Hash32,
    pub validation: ValidationMode,
    pub committee: Vec<NodeId>,
    pub evicted: Vec<NodeId>,
    pub recipients: Vec<NodeId>,
    pub threshold: usize,
    pub attempts: Vec<AttemptSummary>,
    /// Attestations and the block proposal.
    pub transcript: Transcript,
}

impl BlockOutcome {
    /// Largest number of correct level-1 submissions seen in any attempt.
    pub fn consistent_submitters(&self) -> usize {
        self.attempts
            .iter()
            .map(|a| a.consistent_submissions)
            .max()
            .unwrap_or(0)
    }
}

/// A population of nodes producing one block per interval.
#[derive(Debug)]
pub struct World {
    config: WorldConfig,
    field: PrimeField,
    oneway: OneWayFn,
    store: ChainStore,
    rng: SeededRng,
    interval: u64,
}

impl World {
    pub fn new(config: WorldConfig) -> ChainResult<Self> {
        let field = PrimeField::new(config.prime.clone())?;
        if field.modulus().bits() < MIN_BLOCK_PRIME_BITS {
            return Err(ChainError::FieldTooSmall);
        }
        if &BigUint::from(config.node_count) >= field.modulus() {
            return Err(ChainError::Precondition("node ids must be below p".into()));
        }
        if config.recipients < 3 || config.recipients > config.node_count as usize {
            return Err(ChainError::Precondition(format!(
                "recipient count {} must be in 3..={}",
                config.recipients, config.node_count
            )));
        }
        if config.node_count < 2 {
            return Err(ChainError::Precondition("need at least two nodes".into()));
        }
        if let Some(n) = config
            .profiles
            .keys()
            .find(|&&n| n == 0 || n > config.node_count)
        {
            return Err(ChainError::Precondition(format!(
                "profile for unknown node {n}"
            )));
        }
        let oneway = OneWayFn::new(config.oneway.clone(), &field)?;
        let rng = seeded_rng(config.seed);
        Ok(World {
            config,
            field,
            oneway,
            store: ChainStore::new(),
            rng,
            interval: 0,
        })
    }

    pub fn config(&self) -> &WorldConfig {
        &self.config
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn store(&self) -> &ChainStore {
        &self.store
    }

    pub fn into_store(self) -> ChainStore {
        self.store
    }

    fn nodes(&self) -> Vec<NodeId> {
        (1..=self.config.node_count).collect()
    }

    fn profile(&self, node: NodeId) -> NodeProfile {
        self.config.profiles.get(&node).copied().unwrap_or_default()
    }

    /// Seeded workload for interval `k`: `T{k}.{j}` between distinct nodes.
    pub fn generate_transactions(&mut self, k: u64) -> Vec<Transaction> {
        let n = self.config.node_count;
        (0..self.config.txs_per_interval)
            .map(|j| {
                let from_node = self.rng.gen_range(1..=n);
                let mut to_node = self.rng.gen_range(1..n);
                if to_node >= from_node {
                    to_node += 1;
                }
                Transaction {
                    tx_id: format!("T{k}.{}", j + 1),
                    from_node,
                    to_node,
                    amount: self.rng.gen_range(1..=self.config.max_amount.max(1)),
                    timestamp_tick: k * self.config.tau0 + j as u64,
                }
            })
            .collect()
    }

    /// Generates the next interval's workload and runs it.
    pub fn step(&mut self) -> ChainResult<BlockOutcome> {
        let k = self.interval + 1;
        let txs = self.generate_transactions(k);
        self.run_block_interval(k, txs)
    }

    pub fn run(&mut self, intervals: u64) -> ChainResult<Vec<BlockOutcome>> {
        (0..intervals).map(|_| self.step()).collect()
    }

    /// One block interval end to end, appending the resulting block.
    pub fn run_block_interval(
        &mut self,
        k: u64,
        transactions: Vec<Transaction>,
    ) -> ChainResult<BlockOutcome> {
        self.interval = k;
        let nodes = self.nodes();
        let cfg = self.config.clone();
        let mut transcript = Transcript::default();

        let committee = committee_form(
            &transactions,
            cfg.committee_min,
            cfg.committee_max,
            &nodes,
            &mut self.rng,
        )?;
        let commitments: BTreeMap<NodeId, Hash32> = committee
            .iter()
            .map(|&d| (d, self.published_commitment(d, &transactions)))
            .collect();
        let attestation =
            attest_committee(&committee, &transactions, &commitments, cfg.committee_min)?;
        for (&d, c) in &commitments {
            transcript.push(crate::protocol::Message {
                from: ActorId::dealer(d as usize),
                to: Recipient::Actor(ActorId::system()),
                payload: Payload::Attestation {
                    commitment: hex::encode(c),
                    valid: attestation.passed.contains(&d),
                },
                sent_tick: 0,
                deliver_tick: 1,
            });
        }

        let m = cfg.recipients;
        let t = majority_threshold(m);
        let input = BlockSecretInput::from_transactions(&transactions);
        let secret = encode_block_secret(&input, m, t, &self.field)?;

        // recipients are drawn from outside the committee when possible
        let outsiders: Vec<NodeId> = nodes
            .iter()
            .copied()
            .filter(|n| !committee.contains(n))
            .collect();
        let pool = if outsiders.len() >= m {
            &outsiders
        } else {
            &nodes
        };
        let recipients: Vec<NodeId> = pool.choose_multiple(&mut self.rng, m).copied().collect();
        let keys = recipients.iter().map(|&n| self.field.element(n)).collect();
        let params = SchemeParams::new(&self.field, t, keys)?;
        let mut profiles: Vec<Behavior> =
            recipients.iter().map(|&n| self.profile(n).share).collect();
        let active: Vec<usize> = (0..m).collect();

        let mut attempts = Vec::new();
        let mut ticks_used = 0u64;
        let mut recovered = None;
        while ticks_used < cfg.tau1 {
            let seed = self.rng.gen::<u64>();
            let config = SessionConfig {
                mode: cfg.mode,
                tick_budget: cfg.tau1 - ticks_used,
            };
            let run = run_session(
                &params,
                &self.oneway,
                &SecretInput::Multi(secret.clone()),
                &profiles,
                &active,
                seed,
                config,
            )?;
            ticks_used += run.ticks.max(1);
            let cheaters: Vec<NodeId> = match (&run.outcome, cfg.mode) {
                (Outcome::Aborted(AbortReason::Level1Mismatch), VerificationMode::Strict) => {
                    identify_cheaters(&run)?
                        .into_iter()
                        .filter_map(|a| match a.role {
                            Role::Participant(i) => Some(recipients[i]),
                            _ => None,
                        })
                        .collect()
                }
                _ => Vec::new(),
            };
            let summary = AttemptSummary {
                outcome: run.outcome.clone(),
                consistent_submissions: consistent_submissions(&run),
                cheaters: cheaters.clone(),
                ticks: run.ticks,
                run,
            };
            let outcome = summary.outcome.clone();
            attempts.push(summary);
            match outcome {
                Outcome::Recovered(values) => {
                    recovered = Some(values);
                    break;
                }
                Outcome::Aborted(AbortReason::Level1Mismatch) if !cheaters.is_empty() => {
                    // retry without the identified cheaters
                    for c in &cheaters {
                        let i = recipients
                            .iter()
                            .position(|r| r == c)
                            .expect("cheater is a recipient");
                        profiles[i] = Behavior::Silent;
                    }
                }
                Outcome::Aborted(_) => break,
            }
        }

        let validated = match recovered {
            Some(RecoveredValues::Multi(r)) => {
                let s_tilde = attempts
                    .last()
                    .and_then(|a| a.run.s_tilde.clone())
                    .expect("multisecret runs publish s~");
                ValidatedSecret::from_recovery(
                    &r.message,
                    &s_tilde,
                    &transactions,
                    m,
                    t,
                    &self.field,
                )?
            }
            Some(RecoveredValues::Single(_)) => unreachable!("block secrets are vectors"),
            None => ValidatedSecret::timeout(),
        };

        let timestamp = k * cfg.tau0 + ticks_used.min(cfg.tau1);
        let block = mine_block(
            self.store.tip(),
            transactions,
            &validated,
            cfg.nbits,
            timestamp,
            cfg.max_nonce,
        )?;
        let hash = block.hash();
        let height = block.height;
        self.store.append_block(block)?;
        transcript.push(crate::protocol::Message {
            from: ActorId::system(),
            to: Recipient::Broadcast,
            payload: Payload::BlockProposal {
                height,
                block_hash: hex::encode(hash),
                timeout_validated: validated.mode() == ValidationMode::TimeoutValidated,
            },
            sent_tick: timestamp,
            deliver_tick: timestamp + 1,
        });

        Ok(BlockOutcome {
            interval: k,
            height,
            block_hash: hash,
            validation: validated.mode(),
            committee,
            evicted: attestation.evicted,
            recipients,
            threshold: t,
            attempts,
            transcript,
        })
    }

    fn published_commitment(&self, dealer: NodeId, transactions: &[Transaction]) -> Hash32 {
        match self.profile(dealer).dealer {
            DealerBehavior::Honest => dealer_commitment(dealer, transactions),
            DealerBehavior::ForgeCommitment => {
                let mut altered = transactions.to_vec();
                match altered.iter_mut().find(|tx| tx.involves(dealer)) {
                    Some(tx) => tx.amount = tx.amount.wrapping_add(1),
                    None => altered.push(Transaction {
                        tx_id: "forged".into(),
                        from_node: dealer,
                        to_node: dealer,
                        amount: 1,
                        timestamp_tick: 0,
                    }),
                }
                dealer_commitment(dealer, &altered)
            }
        }
    }
}

/// Correct `h`-shares that reached the coalition in a run.
fn consistent_submissions(run: &SessionRun) -> usize {
    run.transcript
        .messages()
        .iter()
        .filter(|m| {
            matches!(m.from.role, Role::Participant(_)) && matches!(m.to, Recipient::Coalition)
        })
        .filter_map(|m| match &m.payload {
            Payload::HShare { key, value } => Some((key, value)),
            _ => None,
        })
        .filter(|(key, value)| {
            run.session
                .level1_shares(std::slice::from_ref(*key))
                .map(|s| &s[0].y == *value)
                .unwrap_or(false)
        })
        .count()
}
