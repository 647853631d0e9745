// SPDX-License-Identifier: Apache-2.0

//! Deterministic discrete-event simulation of a two-level sharing session.
//!
//! Actors are a dealer, the system and `m` participants. Messages travel
//! through a [`Channel`] that delivers them on a later logical tick, in a
//! seeded random order within each tick. Participant identities appear in
//! the public transcript view only as per-session aliases.
//!
//! A run proceeds as follows:
//!
//! 1. tick 0: the system publishes `s~` (multisecret only) and sends every
//!    participant its `h`-share;
//! 2. active participants post their `h`-shares to the coalition, each
//!    according to its [`Behavior`];
//! 3. on the first tick with at least `t` submissions, the coalition closes
//!    the submission window, interpolates `h` from the first `t` of them and
//!    sends a claim to the system;
//! 4. the system verifies the claim and either rejects (the run aborts) or
//!    releases `f`-shares to the submitters;
//! 5. released participants post their `f`-shares and the coalition
//!    interpolates `f` once it holds `t` of them.
//!
//! The whole run must finish within the tick budget.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::error::Error;
use crate::field::FieldElement;
use crate::mss::{self, RecoveredSecrets, SecretVector};
use crate::oneway::OneWayFn;
use crate::poly::{lagrange_interpolate, EvalPoint, Polynomial};
use crate::sss::{
    level1_recover, Level1Claim, RejectReason, SchemeParams, Session, Verdict, VerificationMode,
};
use crate::{seeded_rng, SeededRng};

pub const DEFAULT_TICK_BUDGET: u64 = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("invalid session configuration: {0}")]
    ConfigInvalid(String),
    #[error("cheater identification needs a strict-mode session")]
    ModeUnavailable,
    #[error(transparent)]
    Scheme(#[from] Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Dealer(usize),
    System,
    Participant(usize),
    Node(usize),
}

/// An actor and the alias under which it appears publicly.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActorId {
    pub role: Role,
    pub alias: String,
}

impl ActorId {
    pub fn system() -> Self {
        ActorId {
            role: Role::System,
            alias: "system".to_string(),
        }
    }

    pub fn dealer(index: usize) -> Self {
        ActorId {
            role: Role::Dealer(index),
            alias: format!("dealer-{index}"),
        }
    }

    fn label(&self, view: View) -> String {
        match (view, self.role) {
            (_, Role::System) => "system".to_string(),
            (_, Role::Dealer(i)) => format!("dealer-{i}"),
            (View::Public, _) => self.alias.clone(),
            (View::Private, Role::Participant(i)) => {
                format!("participant-{}:{}", i + 1, self.alias)
            }
            (View::Private, Role::Node(i)) => format!("node-{i}:{}", self.alias),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recipient {
    Actor(ActorId),
    /// Every actor.
    Broadcast,
    /// The participants taking part in recovery.
    Coalition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    HShare {
        key: FieldElement,
        value: FieldElement,
    },
    HRecoveryClaim {
        constant: FieldElement,
        /// Full `h` coefficients, sent in strict mode.
        coefficients: Option<Vec<FieldElement>>,
        /// Keys whose shares were interpolated.
        used: Vec<FieldElement>,
        /// Every key that submitted before the window closed.
        submitters: Vec<FieldElement>,
        /// Submitted shares, sent in strict mode.
        shares: Option<Vec<EvalPoint>>,
    },
    /// The system's acceptance: these keys receive `f`-shares.
    FShareRelease {
        released: Vec<FieldElement>,
    },
    FShare {
        key: FieldElement,
        value: FieldElement,
    },
    PublicValue {
        name: String,
        value: FieldElement,
    },
    Reject {
        reason: AbortReason,
    },
    BlockProposal {
        height: u64,
        block_hash: String,
        timeout_validated: bool,
    },
    Attestation {
        commitment: String,
        valid: bool,
    },
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::HShare { .. } => "h_share",
            Payload::HRecoveryClaim { .. } => "h_recovery_claim",
            Payload::FShareRelease { .. } => "f_share_release",
            Payload::FShare { .. } => "f_share",
            Payload::PublicValue { .. } => "public_value",
            Payload::Reject { .. } => "reject",
            Payload::BlockProposal { .. } => "block_proposal",
            Payload::Attestation { .. } => "attestation",
        }
    }

    fn to_json(&self, view: View) -> Value {
        let s = |x: &FieldElement| x.to_string();
        let list = |xs: &[FieldElement]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let private = view == View::Private;
        let body = match self {
            Payload::HShare { key, value } | Payload::FShare { key, value } => {
                if private {
                    json!({ "key": s(key), "value": s(value) })
                } else {
                    json!({})
                }
            }
            Payload::HRecoveryClaim {
                constant,
                coefficients,
                used,
                submitters,
                shares,
            } => {
                if private {
                    json!({
                        "constant": s(constant),
                        "coefficients": coefficients.as_ref().map(|c| list(c)),
                        "used": list(used),
                        "submitters": list(submitters),
                        "shares": shares.as_ref().map(|ps| ps.iter().map(|p| vec![s(&p.x), s(&p.y)]).collect::<Vec<_>>()),
                    })
                } else {
                    json!({ "submitter_count": submitters.len() })
                }
            }
            Payload::FShareRelease { released } => {
                if private {
                    json!({ "released": list(released) })
                } else {
                    json!({ "released_count": released.len() })
                }
            }
            Payload::PublicValue { name, value } => json!({ "name": name, "value": s(value) }),
            Payload::Reject { reason } => {
                if private {
                    json!({ "reason": reason.to_string() })
                } else {
                    json!({})
                }
            }
            Payload::BlockProposal {
                height,
                block_hash,
                timeout_validated,
            } => {
                json!({ "height": height, "block_hash": block_hash, "timeout_validated": timeout_validated })
            }
            Payload::Attestation { commitment, valid } => {
                json!({ "commitment": commitment, "valid": valid })
            }
        };
        json!({ "kind": self.kind(), "body": body })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub from: ActorId,
    pub to: Recipient,
    pub payload: Payload,
    pub sent_tick: u64,
    pub deliver_tick: u64,
}

/// Which transcript rendering to produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum View {
    /// Aliases only; share values, keys and reasons redacted.
    Public,
    /// Resolved identities and all values.
    Private,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Level1,
    AwaitingVerdict,
    Level2,
    Recovered,
    Aborted,
}

/// State of the system and coalition at the end of a tick.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub tick: u64,
    pub phase: Phase,
    pub h_submissions: usize,
    pub f_released: usize,
    pub f_collected: usize,
}

/// Append-only record of a run, in delivery order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    participants: Vec<ActorId>,
    messages: Vec<Message>,
    snapshots: Vec<Snapshot>,
}

impl Transcript {
    pub fn new(participants: Vec<ActorId>) -> Self {
        Transcript {
            participants,
            ..Default::default()
        }
    }

    pub fn push(&mut self, message: Message) {
        self.messages.push(message);
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn participants(&self) -> &[ActorId] {
        &self.participants
    }

    /// One JSON object per message, keys in sorted order.
    pub fn to_jsonl(&self, view: View) -> String {
        let mut out = String::new();
        for (seq, m) in self.messages.iter().enumerate() {
            let to = match &m.to {
                Recipient::Actor(a) => a.label(view),
                Recipient::Broadcast => "broadcast".to_string(),
                Recipient::Coalition => "coalition".to_string(),
            };
            let record = json!({
                "seq": seq,
                "sent": m.sent_tick,
                "tick": m.deliver_tick,
                "from": m.from.label(view),
                "to": to,
                "payload": m.payload.to_json(view),
            });
            out.push_str(&record.to_string());
            out.push('\n');
        }
        out
    }
}

/// Seeded target-anonymous channel.
#[derive(Debug, Default)]
pub struct Channel {
    pending: BTreeMap<u64, Vec<Message>>,
}

impl Channel {
    /// Schedules `payload` for delivery `1 + delay` ticks after `tick`.
    pub fn send(&mut self, from: ActorId, to: Recipient, payload: Payload, tick: u64, delay: u64) {
        let deliver_tick = tick + 1 + delay;
        self.pending.entry(deliver_tick).or_default().push(Message {
            from,
            to,
            payload,
            sent_tick: tick,
            deliver_tick,
        });
    }

    /// Everything due at `tick`, in a seeded random order.
    pub fn deliver<R: Rng + ?Sized>(&mut self, tick: u64, rng: &mut R) -> Vec<Message> {
        let mut due = self.pending.remove(&tick).unwrap_or_default();
        due.shuffle(rng);
        due
    }

    pub fn is_idle(&self) -> bool {
        self.pending.is_empty()
    }

    pub fn pending_count(&self) -> usize {
        self.pending.values().map(Vec::len).sum()
    }
}

/// How a participant behaves once it holds its `h`-share.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Behavior {
    #[default]
    Honest,
    /// Submits `h(a_i) + offset`.
    CorruptHShare(u64),
    Silent,
    /// Submits honestly, `delay` ticks late.
    Late(u64),
}

impl Behavior {
    fn delay(self) -> u64 {
        match self {
            Behavior::Late(d) => d,
            _ => 0,
        }
    }
}

impl fmt::Display for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Behavior::Honest => f.write_str("honest"),
            Behavior::CorruptHShare(o) => write!(f, "corrupt:{o}"),
            Behavior::Silent => f.write_str("silent"),
            Behavior::Late(d) => write!(f, "late:{d}"),
        }
    }
}

impl FromStr for Behavior {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, ProtocolError> {
        let bad = || ProtocolError::ConfigInvalid(format!("unknown behavior `{s}`"));
        let num = |v: &str| v.trim().parse::<u64>().map_err(|_| bad());
        match s.trim().split_once(':') {
            None if s.trim() == "honest" => Ok(Behavior::Honest),
            None if s.trim() == "silent" => Ok(Behavior::Silent),
            Some(("corrupt", v)) => Ok(Behavior::CorruptHShare(num(v)?)),
            Some(("late", v)) => Ok(Behavior::Late(num(v)?)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SecretInput {
    Single(FieldElement),
    Multi(SecretVector),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SessionConfig {
    pub mode: VerificationMode,
    pub tick_budget: u64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            mode: VerificationMode::ConstantTerm,
            tick_budget: DEFAULT_TICK_BUDGET,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AbortReason {
    BelowThreshold,
    Level1Mismatch,
    Timeout,
}

impl fmt::Display for AbortReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AbortReason::BelowThreshold => "below_threshold",
            AbortReason::Level1Mismatch => "level1_mismatch",
            AbortReason::Timeout => "timeout",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecoveredValues {
    Single(FieldElement),
    Multi(RecoveredSecrets),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Recovered(RecoveredValues),
    Aborted(AbortReason),
}

/// Everything a run produces. `session` is the system's final state.
#[derive(Clone, Debug)]
pub struct SessionRun {
    pub outcome: Outcome,
    pub transcript: Transcript,
    pub session: Session,
    pub mode: VerificationMode,
    pub s_tilde: Option<FieldElement>,
    pub ticks: u64,
}

impl SessionRun {
    pub fn is_recovered(&self) -> bool {
        matches!(self.outcome, Outcome::Recovered(_))
    }
}

struct Participant {
    id: ActorId,
    active: bool,
    behavior: Behavior,
}

struct Coalition {
    window_open: bool,
    submissions: Vec<(usize, EvalPoint)>,
    combiner: Option<usize>,
    f_points: Vec<EvalPoint>,
}

fn validate(
    params: &SchemeParams,
    oneway: &OneWayFn,
    secret: &SecretInput,
    profiles: &[Behavior],
    active: &[usize],
) -> Result<(), ProtocolError> {
    let m = params.participant_count();
    let invalid = |msg: String| Err(ProtocolError::ConfigInvalid(msg));
    if profiles.len() != m {
        return invalid(format!("{} profiles for {m} participants", profiles.len()));
    }
    if active.is_empty() {
        return invalid("active subset is empty".to_string());
    }
    if let Some(&i) = active.iter().find(|&&i| i >= m) {
        return invalid(format!("active participant {} does not exist", i + 1));
    }
    if oneway.field() != params.field() {
        return invalid("one-way function is over a different field".to_string());
    }
    for (i, b) in profiles.iter().enumerate() {
        if let Behavior::CorruptHShare(o) = b {
            if params.field().element(*o).is_zero() {
                return invalid(format!(
                    "participant {} corruption offset is 0 mod p",
                    i + 1
                ));
            }
        }
    }
    match secret {
        SecretInput::Single(s) if s.field() != params.field() => {
            invalid("secret is over a different field".to_string())
        }
        _ => Ok(()),
    }
}

fn make_aliases(rng: &mut SeededRng, m: usize) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut aliases = Vec::with_capacity(m);
    while aliases.len() < m {
        let alias = format!("anon-{:016x}", rng.gen::<u64>());
        if seen.insert(alias.clone()) {
            aliases.push(alias);
        }
    }
    aliases
}

/// Runs one session end to end. `active` holds 0-based participant indices.
pub fn run_session(
    params: &SchemeParams,
    oneway: &OneWayFn,
    secret: &SecretInput,
    profiles: &[Behavior],
    active: &[usize],
    seed: u64,
    config: SessionConfig,
) -> Result<SessionRun, ProtocolError> {
    validate(params, oneway, secret, profiles, active)?;
    let t = params.threshold();
    let mut setup_rng = seeded_rng(seed);
    let mut channel_rng = seeded_rng(seed ^ 0x6368_616e_6e65_6c00);

    let (mut session, s_tilde, message_len) = match secret {
        SecretInput::Single(s) => (
            Session::generate(params, oneway, s.clone(), &mut setup_rng)?,
            None,
            None,
        ),
        SecretInput::Multi(v) => {
            let (derived, session) = mss::share(v, params, oneway)?;
            (session, Some(derived.s_tilde), Some(v.message_len()))
        }
    };

    let aliases = make_aliases(&mut setup_rng, params.participant_count());
    let active_set: BTreeSet<usize> = active.iter().copied().collect();
    let participants: Vec<Participant> = aliases
        .into_iter()
        .enumerate()
        .map(|(i, alias)| Participant {
            id: ActorId {
                role: Role::Participant(i),
                alias,
            },
            active: active_set.contains(&i),
            behavior: profiles[i],
        })
        .collect();

    let system = ActorId::system();
    let mut transcript = Transcript::new(participants.iter().map(|p| p.id.clone()).collect());
    let mut channel = Channel::default();
    let mut coalition = Coalition {
        window_open: true,
        submissions: Vec::new(),
        combiner: None,
        f_points: Vec::new(),
    };
    let mut phase = Phase::Level1;
    let mut outcome: Option<Outcome> = None;
    let mut released_count = 0usize;

    if let Some(st) = &s_tilde {
        channel.send(
            system.clone(),
            Recipient::Broadcast,
            Payload::PublicValue {
                name: "s_tilde".to_string(),
                value: st.clone(),
            },
            0,
            0,
        );
    }
    for (p, share) in participants
        .iter()
        .zip(session.level1_shares(params.public_keys())?)
    {
        channel.send(
            system.clone(),
            Recipient::Actor(p.id.clone()),
            Payload::HShare {
                key: share.x,
                value: share.y,
            },
            0,
            0,
        );
    }

    let mut tick = 0u64;
    while outcome.is_none() {
        tick += 1;
        if tick > config.tick_budget || channel.is_idle() {
            break;
        }
        for msg in channel.deliver(tick, &mut channel_rng) {
            let payload = msg.payload.clone();
            let to = msg.to.clone();
            let from = msg.from.clone();
            transcript.push(msg);
            if outcome.is_some() {
                continue;
            }
            match (to, payload) {
                (Recipient::Actor(a), Payload::HShare { key, value }) => {
                    let Role::Participant(i) = a.role else {
                        continue;
                    };
                    let p = &participants[i];
                    if !p.active || p.behavior == Behavior::Silent {
                        continue;
                    }
                    let value = match p.behavior {
                        Behavior::CorruptHShare(o) => &value + &params.field().element(o),
                        _ => value,
                    };
                    channel.send(
                        p.id.clone(),
                        Recipient::Coalition,
                        Payload::HShare { key, value },
                        tick,
                        p.behavior.delay(),
                    );
                }
                (Recipient::Coalition, Payload::HShare { key, value }) => {
                    let Role::Participant(i) = from.role else {
                        continue;
                    };
                    if coalition.window_open && !coalition.submissions.iter().any(|(j, _)| *j == i)
                    {
                        coalition.submissions.push((i, EvalPoint::new(key, value)));
                    }
                }
                (Recipient::Actor(a), claim @ Payload::HRecoveryClaim { .. })
                    if a.role == Role::System =>
                {
                    let (verdict, reason) = system_verdict(&mut session, &claim, config.mode)?;
                    match verdict {
                        Some(points) => {
                            released_count = points.len();
                            channel.send(
                                system.clone(),
                                Recipient::Coalition,
                                Payload::FShareRelease {
                                    released: points.iter().map(|p| p.x.clone()).collect(),
                                },
                                tick,
                                0,
                            );
                            for point in points {
                                let idx = params
                                    .key_index(&point.x)
                                    .expect("released key is registered");
                                channel.send(
                                    system.clone(),
                                    Recipient::Actor(participants[idx].id.clone()),
                                    Payload::FShare {
                                        key: point.x,
                                        value: point.y,
                                    },
                                    tick,
                                    // lands after the release notice
                                    1,
                                );
                            }
                            phase = Phase::Level2;
                        }
                        None => {
                            let reason = reason.expect("rejection carries a reason");
                            channel.send(
                                system.clone(),
                                Recipient::Coalition,
                                Payload::Reject { reason },
                                tick,
                                0,
                            );
                            phase = Phase::Aborted;
                            outcome = Some(Outcome::Aborted(reason));
                        }
                    }
                }
                (Recipient::Actor(a), Payload::FShare { key, value }) => {
                    let Role::Participant(i) = a.role else {
                        continue;
                    };
                    let p = &participants[i];
                    channel.send(
                        p.id.clone(),
                        Recipient::Coalition,
                        Payload::FShare { key, value },
                        tick,
                        p.behavior.delay(),
                    );
                }
                (Recipient::Coalition, Payload::FShare { key, value })
                    if !coalition.f_points.iter().any(|p| p.x == key) =>
                {
                    coalition.f_points.push(EvalPoint::new(key, value));
                }
                _ => {}
            }
        }

        if outcome.is_none() && coalition.window_open && coalition.submissions.len() >= t {
            coalition.window_open = false;
            let combiner = coalition.submissions[0].0;
            coalition.combiner = Some(combiner);
            let used: Vec<EvalPoint> = coalition.submissions[..t]
                .iter()
                .map(|(_, p)| p.clone())
                .collect();
            let (h, constant) = level1_recover(&used, t)?;
            let strict = config.mode == VerificationMode::Strict;
            let claim = Payload::HRecoveryClaim {
                constant,
                coefficients: strict.then(|| h.coeffs().to_vec()),
                used: used.iter().map(|p| p.x.clone()).collect(),
                submitters: coalition
                    .submissions
                    .iter()
                    .map(|(_, p)| p.x.clone())
                    .collect(),
                shares: strict.then(|| {
                    coalition
                        .submissions
                        .iter()
                        .map(|(_, p)| p.clone())
                        .collect()
                }),
            };
            channel.send(
                participants[combiner].id.clone(),
                Recipient::Actor(system.clone()),
                claim,
                tick,
                0,
            );
            phase = Phase::AwaitingVerdict;
        }

        if outcome.is_none() && phase == Phase::Level2 && coalition.f_points.len() >= t {
            let f = lagrange_interpolate(&coalition.f_points[..t], t)?;
            let values = match (&s_tilde, message_len) {
                (Some(st), Some(k)) => RecoveredValues::Multi(mss::recover_secrets(&f, st, k)?),
                _ => RecoveredValues::Single(f.constant_term().clone()),
            };
            phase = Phase::Recovered;
            outcome = Some(Outcome::Recovered(values));
        }

        transcript.snapshots.push(Snapshot {
            tick,
            phase,
            h_submissions: coalition.submissions.len(),
            f_released: released_count,
            f_collected: coalition.f_points.len(),
        });
    }

    let outcome = outcome.unwrap_or_else(|| {
        if !channel.is_idle() || phase != Phase::Level1 {
            Outcome::Aborted(AbortReason::Timeout)
        } else {
            Outcome::Aborted(AbortReason::BelowThreshold)
        }
    });

    Ok(SessionRun {
        outcome,
        transcript,
        session,
        mode: config.mode,
        s_tilde,
        ticks: tick.min(config.tick_budget),
    })
}

/// The system's handling of a claim: released points, or an abort reason.
fn system_verdict(
    session: &mut Session,
    claim: &Payload,
    mode: VerificationMode,
) -> Result<(Option<Vec<EvalPoint>>, Option<AbortReason>), ProtocolError> {
    let Payload::HRecoveryClaim {
        constant,
        coefficients,
        submitters,
        shares,
        ..
    } = claim
    else {
        unreachable!("only claims reach the verifier")
    };
    let level1 = match coefficients {
        Some(c) => Level1Claim::Polynomial(Polynomial::from_coeffs(c.clone())?),
        None => Level1Claim::ConstantTerm(constant.clone()),
    };
    // in strict mode, shares that fail the per-share check are not released
    let eligible: Vec<FieldElement> = match (mode, shares) {
        (VerificationMode::Strict, Some(shares)) => {
            let cheaters = session.mismatched_shares(shares)?;
            submitters
                .iter()
                .filter(|k| !cheaters.contains(k))
                .cloned()
                .collect()
        }
        _ => submitters.clone(),
    };
    Ok(
        match session.verify_and_release(&level1, &eligible, mode)? {
            Verdict::Accepted(points) => (Some(points), None),
            Verdict::Rejected(RejectReason::ClaimMismatch) => {
                (None, Some(AbortReason::Level1Mismatch))
            }
            Verdict::Rejected(RejectReason::BelowThreshold { .. }) => {
                (None, Some(AbortReason::BelowThreshold))
            }
        },
    )
}

/// Participants whose submitted `h`-share differs from the system's record.
pub fn identify_cheaters(run: &SessionRun) -> Result<BTreeSet<ActorId>, ProtocolError> {
    if run.mode != VerificationMode::Strict {
        return Err(ProtocolError::ModeUnavailable);
    }
    let mut cheaters = BTreeSet::new();
    for m in run.transcript.messages() {
        if let Payload::HRecoveryClaim {
            shares: Some(shares),
            ..
        } = &m.payload
        {
            for key in run.session.mismatched_shares(shares)? {
                let idx = run
                    .session
                    .params()
                    .key_index(&key)
                    .expect("mismatched key is registered");
                cheaters.insert(run.transcript.participants()[idx].clone());
            }
        }
    }
    Ok(cheaters)
}
