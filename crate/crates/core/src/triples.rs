//! Exact integer arithmetic on weight pairs `(p, q)`.
//!
//! Everything here is pure and allocation-light; products are formed in
//! `i128` so the six cross products can never overflow for entries that
//! pass the magnitude bound.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on the magnitude of a weight entry (62 bits).
pub const DEFAULT_ENTRY_LIMIT: i64 = (1i64 << 62) - 1;

/// An integer triple.
pub type Triple = [i64; 3];

/// A permutation of `{1, 2, 3}` stored as 0-based images: `self.0[i] = sigma(i+1) - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm3(pub [usize; 3]);

impl Perm3 {
    pub const ID: Perm3 = Perm3([0, 1, 2]);
    pub const T12: Perm3 = Perm3([1, 0, 2]);
    pub const T13: Perm3 = Perm3([2, 1, 0]);
    pub const T23: Perm3 = Perm3([0, 2, 1]);
    pub const C123: Perm3 = Perm3([1, 2, 0]);
    pub const C132: Perm3 = Perm3([2, 0, 1]);

    /// All of S3 in the fixed order used for the six products:
    /// id, (12), (13), (23), (123), (132).
    pub const ALL: [Perm3; 6] = [
        Perm3::ID,
        Perm3::T12,
        Perm3::T13,
        Perm3::T23,
        Perm3::C123,
        Perm3::C132,
    ];

    pub fn fixes_three(self) -> bool {
        self.0[2] == 2
    }

    /// `t_sigma = (t[sigma(1)], t[sigma(2)], t[sigma(3)])`.
    pub fn apply(self, t: Triple) -> Triple {
        [t[self.0[0]], t[self.0[1]], t[self.0[2]]]
    }

    pub fn is_valid(self) -> bool {
        let mut seen = [false; 3];
        for &i in &self.0 {
            if i > 2 || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        true
    }
}

impl fmt::Display for Perm3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match *self {
            Perm3::ID => "id",
            Perm3::T12 => "(12)",
            Perm3::T13 => "(13)",
            Perm3::T23 => "(23)",
            Perm3::C123 => "(123)",
            Perm3::C132 => "(132)",
            _ => "?",
        };
        f.write_str(name)
    }
}

/// A pair of weight triples with equal sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawPair", into = "RawPair")]
pub struct PQPair {
    p: Triple,
    q: Triple,
}

#[derive(Serialize, Deserialize)]
struct RawPair {
    p: Triple,
    q: Triple,
}

impl TryFrom<RawPair> for PQPair {
    type Error = Error;
    fn try_from(raw: RawPair) -> Result<Self> {
        PQPair::new(raw.p, raw.q)
    }
}

impl From<PQPair> for RawPair {
    fn from(pair: PQPair) -> Self {
        RawPair { p: pair.p, q: pair.q }
    }
}

impl PQPair {
    pub fn new(p: Triple, q: Triple) -> Result<Self> {
        Self::with_limit(p, q, DEFAULT_ENTRY_LIMIT)
    }

    /// Builds a pair, rejecting unequal sums and entries with `|x| > limit`.
    pub fn with_limit(p: Triple, q: Triple, limit: i64) -> Result<Self> {
        for &x in p.iter().chain(q.iter()) {
            check_bound(x as i128, limit)?;
        }
        let p_sum: i128 = p.iter().map(|&x| x as i128).sum();
        let q_sum: i128 = q.iter().map(|&x| x as i128).sum();
        if p_sum != q_sum {
            return Err(Error::SumMismatch { p_sum, q_sum });
        }
        Ok(PQPair { p, q })
    }

    pub fn p(&self) -> Triple {
        self.p
    }

    pub fn q(&self) -> Triple {
        self.q
    }

    pub fn as_tuple(&self) -> (Triple, Triple) {
        (self.p, self.q)
    }

    fn key(&self) -> [i64; 6] {
        [self.p[0], self.p[1], self.p[2], self.q[0], self.q[1], self.q[2]]
    }

    pub fn p_min(&self) -> i64 {
        *self.p.iter().min().unwrap()
    }

    pub fn p_max(&self) -> i64 {
        *self.p.iter().max().unwrap()
    }
}

impl fmt::Display for PQPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(({},{},{}),({},{},{}))",
            self.p[0], self.p[1], self.p[2], self.q[0], self.q[1], self.q[2]
        )
    }
}

fn check_bound(value: i128, limit: i64) -> Result<i64> {
    if value.unsigned_abs() > limit as u128 {
        Err(Error::Overflow { value, limit })
    } else {
        Ok(value as i64)
    }
}

/// gcd of absolute values; `gcd(0, 0) = 0`.
pub fn gcd(a: i128, b: i128) -> u128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Whether the circle action defined by the pair is free.
pub fn is_admissible(pair: &PQPair) -> bool {
    Perm3::ALL.iter().all(|s| {
        let (a, b) = cross_differences(pair, *s);
        gcd(a, b) == 1
    })
}

fn cross_differences(pair: &PQPair, s: Perm3) -> (i128, i128) {
    let p = s.apply(pair.p);
    (
        p[0] as i128 - pair.q[0] as i128,
        p[1] as i128 - pair.q[1] as i128,
    )
}

/// The six products `(p_s(1) - q1)(p_s(2) - q2)` in [`Perm3::ALL`] order.
pub fn six_products(pair: &PQPair) -> [i128; 6] {
    let mut out = [0i128; 6];
    for (slot, s) in out.iter_mut().zip(Perm3::ALL) {
        let (a, b) = cross_differences(pair, s);
        *slot = a * b;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurvatureClass {
    PositivelyCurved,
    AlmostPositive,
    QuasiPositive,
    FlatPlaneEverywhere,
}

impl CurvatureClass {
    pub const ALL: [CurvatureClass; 4] = [
        CurvatureClass::PositivelyCurved,
        CurvatureClass::AlmostPositive,
        CurvatureClass::QuasiPositive,
        CurvatureClass::FlatPlaneEverywhere,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CurvatureClass::PositivelyCurved => "PositivelyCurved",
            CurvatureClass::AlmostPositive => "AlmostPositive",
            CurvatureClass::QuasiPositive => "QuasiPositive",
            CurvatureClass::FlatPlaneEverywhere => "FlatPlaneEverywhere",
        }
    }
}

impl fmt::Display for CurvatureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CurvatureClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CurvatureClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown curvature class '{s}'")))
    }
}

/// The Eschenburg-metric curvature class together with the six products it was read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub class: CurvatureClass,
    pub products: [i128; 6],
}

/// Reads the curvature class off the sign pattern of the six products.
pub fn classify_products(products: &[i128; 6]) -> CurvatureClass {
    let pos = products.iter().any(|&x| x > 0);
    let neg = products.iter().any(|&x| x < 0);
    let zero = products.iter().any(|&x| x == 0);
    match (pos, neg, zero) {
        (true, false, false) => CurvatureClass::PositivelyCurved,
        (true, false, true) => CurvatureClass::AlmostPositive,
        (true, true, _) => CurvatureClass::QuasiPositive,
        (false, _, _) => CurvatureClass::FlatPlaneEverywhere,
    }
}

pub fn classify(pair: &PQPair) -> Result<Classification> {
    require_admissible(pair)?;
    let products = six_products(pair);
    Ok(Classification {
        class: classify_products(&products),
        products,
    })
}

fn require_admissible(pair: &PQPair) -> Result<()> {
    if is_admissible(pair) {
        Ok(())
    } else {
        Err(Error::NotAdmissible {
            p: pair.p,
            q: pair.q,
        })
    }
}

/// Eschenburg's criterion: no `q_i` lies in `[min p, max p]`.
pub fn eschenburg_positive(pair: &PQPair) -> Result<bool> {
    require_admissible(pair)?;
    let (lo, hi) = (pair.p_min(), pair.p_max());
    Ok(pair.q.iter().all(|&x| x < lo || x > hi))
}

/// Some Eschenburg metric is positive: moving one `q_i` into the third slot
/// makes all six products positive. The products only see `q1, q2`, so the
/// fixed-block classification is the case where no move is needed.
pub fn positive_for_some_block(pair: &PQPair) -> Result<bool> {
    require_admissible(pair)?;
    Ok(Perm3::ALL.iter().any(|s| {
        let moved = PQPair { p: pair.p, q: s.apply(pair.q) };
        classify_products(&six_products(&moved)) == CurvatureClass::PositivelyCurved
    }))
}

/// The seven modifications that preserve the diffeomorphism type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    Shift(i64),
    Negate,
    PermP(Perm3),
    PermQ(Perm3),
    SwapPQ,
}

impl Move {
    /// Position in the list of modifications (1 through 7).
    pub fn number(self) -> u8 {
        match self {
            Move::Shift(_) => 1,
            Move::Negate => 2,
            Move::PermP(s) if s.fixes_three() => 3,
            Move::PermP(_) => 4,
            Move::PermQ(s) if s.fixes_three() => 5,
            Move::PermQ(_) => 6,
            Move::SwapPQ => 7,
        }
    }

    pub fn eschenburg_isometry(self) -> bool {
        matches!(self.number(), 1..=5)
    }

    pub fn wilking_isometry(self) -> bool {
        matches!(self.number(), 1 | 2 | 3 | 5 | 7)
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Shift(m) => write!(f, "shift({m})"),
            Move::Negate => f.write_str("negate"),
            Move::PermP(s) => write!(f, "perm_p{s}"),
            Move::PermQ(s) => write!(f, "perm_q{s}"),
            Move::SwapPQ => f.write_str("swap_pq"),
        }
    }
}

pub fn apply_move(pair: &PQPair, mv: Move) -> Result<PQPair> {
    apply_move_with_limit(pair, mv, DEFAULT_ENTRY_LIMIT)
}

pub fn apply_move_with_limit(pair: &PQPair, mv: Move, limit: i64) -> Result<PQPair> {
    let map = |t: Triple, f: &dyn Fn(i128) -> i128| -> Result<Triple> {
        Ok([
            check_bound(f(t[0] as i128), limit)?,
            check_bound(f(t[1] as i128), limit)?,
            check_bound(f(t[2] as i128), limit)?,
        ])
    };
    let (p, q) = match mv {
        Move::Shift(m) => {
            let m = m as i128;
            (map(pair.p, &|x| x + m)?, map(pair.q, &|x| x + m)?)
        }
        Move::Negate => (map(pair.p, &|x| -x)?, map(pair.q, &|x| -x)?),
        Move::PermP(s) => {
            check_perm(s)?;
            (s.apply(pair.p), pair.q)
        }
        Move::PermQ(s) => {
            check_perm(s)?;
            (pair.p, s.apply(pair.q))
        }
        Move::SwapPQ => (pair.q, pair.p),
    };
    Ok(PQPair { p, q })
}

fn check_perm(s: Perm3) -> Result<()> {
    if s.is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{:?} is not a permutation", s.0)))
    }
}

/// Which modifications generate the equivalence used by [`canonical_form`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveSet {
    EschenburgIsometries,
    WilkingIsometries,
    AllDiffeos,
}

impl MoveSet {
    /// Generators besides shifting, which is quotiented out by normalization.
    pub fn generators(self) -> &'static [Move] {
        const ESCH: [Move; 5] = [
            Move::Negate,
            Move::PermP(Perm3::T12),
            Move::PermP(Perm3::T13),
            Move::PermP(Perm3::T23),
            Move::PermQ(Perm3::T12),
        ];
        const WILK: [Move; 4] = [
            Move::Negate,
            Move::PermP(Perm3::T12),
            Move::PermQ(Perm3::T12),
            Move::SwapPQ,
        ];
        const ALL: [Move; 8] = [
            Move::Negate,
            Move::PermP(Perm3::T12),
            Move::PermP(Perm3::T13),
            Move::PermP(Perm3::T23),
            Move::PermQ(Perm3::T12),
            Move::PermQ(Perm3::T13),
            Move::PermQ(Perm3::T23),
            Move::SwapPQ,
        ];
        match self {
            MoveSet::EschenburgIsometries => &ESCH,
            MoveSet::WilkingIsometries => &WILK,
            MoveSet::AllDiffeos => &ALL,
        }
    }

    pub fn contains(self, mv: Move) -> bool {
        match self {
            MoveSet::EschenburgIsometries => mv.eschenburg_isometry(),
            MoveSet::WilkingIsometries => mv.wilking_isometry(),
            MoveSet::AllDiffeos => true,
        }
    }
}

/// Shifts so that `min(p) = 0`, returning the shift used.
pub fn normalize_shift(pair: &PQPair) -> Result<(PQPair, i64)> {
    let m = -pair.p_min();
    Ok((apply_move(pair, Move::Shift(m))?, m))
}

/// Breadth-first exploration of the shift-normalized orbit. The map sends
/// each visited pair to its predecessor and the generator used to reach it.
fn explore_orbit(
    start: &PQPair,
    set: MoveSet,
) -> Result<(PQPair, HashMap<PQPair, Option<(PQPair, Move)>>)> {
    let (root, _) = normalize_shift(start)?;
    let mut parent: HashMap<PQPair, Option<(PQPair, Move)>> = HashMap::new();
    parent.insert(root, None);
    let mut queue = VecDeque::from([root]);
    while let Some(cur) = queue.pop_front() {
        for &g in set.generators() {
            let (next, _) = normalize_shift(&apply_move(&cur, g)?)?;
            if !parent.contains_key(&next) {
                parent.insert(next, Some((cur, g)));
                queue.push_back(next);
            }
        }
    }
    Ok((root, parent))
}

/// All shift-normalized pairs reachable from `pair`.
pub fn orbit(pair: &PQPair, set: MoveSet) -> Result<BTreeSet<PQPair>> {
    let (_, parent) = explore_orbit(pair, set)?;
    Ok(parent.into_keys().collect())
}

/// Lexicographically least shift-normalized pair in the orbit.
pub fn canonical_form(pair: &PQPair, set: MoveSet) -> Result<PQPair> {
    require_admissible(pair)?;
    canonical_form_unchecked(pair, set)
}

fn canonical_form_unchecked(pair: &PQPair, set: MoveSet) -> Result<PQPair> {
    let (_, parent) = explore_orbit(pair, set)?;
    Ok(*parent.keys().min_by_key(|x| x.key()).unwrap())
}

/// A move word taking `from` to `to`, if they are related by `set`.
/// Every generator step is followed by the shift that re-normalizes `min(p) = 0`.
pub fn move_word(from: &PQPair, to: &PQPair, set: MoveSet) -> Result<Option<Vec<Move>>> {
    let (root, parent) = explore_orbit(from, set)?;
    let (target, target_shift) = normalize_shift(to)?;
    if !parent.contains_key(&target) {
        return Ok(None);
    }
    let mut steps = Vec::new();
    let mut cur = target;
    while let Some(Some((prev, g))) = parent.get(&cur) {
        steps.push(*g);
        cur = *prev;
    }
    steps.reverse();
    let mut word = Vec::new();
    let (_, first_shift) = normalize_shift(from)?;
    if first_shift != 0 {
        word.push(Move::Shift(first_shift));
    }
    let mut at = root;
    for g in steps {
        word.push(g);
        let moved = apply_move(&at, g)?;
        let (normed, m) = normalize_shift(&moved)?;
        if m != 0 {
            word.push(Move::Shift(m));
        }
        at = normed;
    }
    if target_shift != 0 {
        word.push(Move::Shift(-target_shift));
    }
    Ok(Some(word))
}

pub fn apply_word(pair: &PQPair, word: &[Move]) -> Result<PQPair> {
    word.iter().try_fold(*pair, |acc, &mv| apply_move(&acc, mv))
}

fn kerin_example() -> PQPair {
    PQPair { p: [0, 1, 1], q: [0, 0, 2] }
}

fn wilking_example() -> PQPair {
    PQPair { p: [0, 0, 0], q: [1, 0, -1] }
}

/// Whether the pair is related to one of the two known almost positively
/// curved examples by the seven modifications.
pub fn is_exceptional(pair: &PQPair) -> Result<bool> {
    let c = canonical_form(pair, MoveSet::AllDiffeos)?;
    Ok(c == canonical_form_unchecked(&kerin_example(), MoveSet::AllDiffeos)?
        || c == canonical_form_unchecked(&wilking_example(), MoveSet::AllDiffeos)?)
}

/// Outcome of reducing a pair with a coincidence `p_i = q_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EqualPqOutcome {
    /// `p = (a, 0, 0)`, `q = (a, -1, 1)` with `a >= 0`.
    Normal { a: i64, moves: Vec<Move>, pair: PQPair },
    /// Two of the `q` entries coincide with `p_1`; the pair is exceptional.
    Exceptional { moves: Vec<Move>, pair: PQPair },
}

/// Reduces a pair with some `p_i = q_j` to the form `((a,0,0),(a,-1,1))`.
pub fn equal_pq_normal_form(pair: &PQPair) -> Result<EqualPqOutcome> {
    require_admissible(pair)?;
    let (p, q) = pair.as_tuple();
    let pos = [0usize, 1, 2]
        .into_iter()
        .flat_map(|j| (0..3).map(move |i| (i, j)))
        .find(|&(i, j)| p[i] == q[j])
        .ok_or_else(|| Error::PreconditionFailed(format!("no p_i equals a q_j in {pair}")))?;

    let mut moves = Vec::new();
    let mut cur = *pair;
    let mut push = |cur: &mut PQPair, mv: Move| -> Result<()> {
        *cur = apply_move(cur, mv)?;
        moves.push(mv);
        Ok(())
    };
    let to_front = |i: usize| match i {
        0 => None,
        1 => Some(Perm3::T12),
        _ => Some(Perm3::T13),
    };
    if let Some(s) = to_front(pos.0) {
        push(&mut cur, Move::PermP(s))?;
    }
    if let Some(s) = to_front(pos.1) {
        push(&mut cur, Move::PermQ(s))?;
    }
    debug_assert_eq!(cur.p[0], cur.q[0]);

    if cur.q[1] == cur.p[0] || cur.q[2] == cur.p[0] {
        if cur.q[1] != cur.p[0] {
            push(&mut cur, Move::PermQ(Perm3::T23))?;
        }
        return Ok(EqualPqOutcome::Exceptional { moves, pair: cur });
    }

    if cur.q[1] == cur.q[2] {
        // p2, p3 are q2 +- 1 and distinct; centre on q2 and trade roles.
        let centre = cur.q[1];
        if centre != 0 {
            push(&mut cur, Move::Shift(-centre))?;
        }
        push(&mut cur, Move::SwapPQ)?;
    } else {
        let centre = cur.p[1];
        if centre != 0 {
            push(&mut cur, Move::Shift(-centre))?;
        }
    }
    if cur.p[0] < 0 {
        push(&mut cur, Move::Negate)?;
    }
    if cur.q[1] > cur.q[2] {
        push(&mut cur, Move::PermQ(Perm3::T23))?;
    }
    let a = cur.p[0];
    if cur.p != [a, 0, 0] || cur.q != [a, -1, 1] || a < 0 {
        return Err(Error::PreconditionFailed(format!(
            "reduction of {pair} ended at {cur}, which is not of the form ((a,0,0),(a,-1,1))"
        )));
    }
    Ok(EqualPqOutcome::Normal { a, moves, pair: cur })
}

/// The three sub-cases of the all-products-non-positive family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NegCase {
    /// `min{q1,q2} <= min p` and `max{q1,q2} >= max p`.
    Case1,
    /// Isometric to `((0,0,2),(0,1,1))`.
    Case2,
    /// Isometric to `((-1,0,1),(0,0,0))`.
    Case3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegCaseReport {
    pub case: NegCase,
    /// Eschenburg-isometry word taking the input to `representative`.
    pub moves: Vec<Move>,
    pub representative: PQPair,
}

pub fn case2_representative() -> PQPair {
    PQPair { p: [0, 0, 2], q: [0, 1, 1] }
}

pub fn case3_representative() -> PQPair {
    PQPair { p: [-1, 0, 1], q: [0, 0, 0] }
}

fn is_negcase1(pair: &PQPair) -> bool {
    let (q1, q2) = (pair.q[0], pair.q[1]);
    q1.min(q2) <= pair.p_min() && q1.max(q2) >= pair.p_max()
}

/// Splits a flat-plane-everywhere pair into the three sub-cases.
pub fn negcase_analysis(pair: &PQPair) -> Result<NegCaseReport> {
    let c = classify(pair)?;
    if c.class != CurvatureClass::FlatPlaneEverywhere {
        return Err(Error::PreconditionFailed(format!(
            "{pair} is {}, not FlatPlaneEverywhere",
            c.class
        )));
    }
    if is_negcase1(pair) {
        return Ok(NegCaseReport {
            case: NegCase::Case1,
            moves: Vec::new(),
            representative: *pair,
        });
    }
    if let Some(rep) = orbit(pair, MoveSet::EschenburgIsometries)?
        .into_iter()
        .find(is_negcase1)
    {
        let moves = move_word(pair, &rep, MoveSet::EschenburgIsometries)?
            .expect("orbit member is reachable");
        return Ok(NegCaseReport {
            case: NegCase::Case1,
            moves,
            representative: rep,
        });
    }
    for (case, rep) in [
        (NegCase::Case2, case2_representative()),
        (NegCase::Case3, case3_representative()),
    ] {
        if let Some(moves) = move_word(pair, &rep, MoveSet::EschenburgIsometries)? {
            return Ok(NegCaseReport {
                case,
                moves,
                representative: rep,
            });
        }
    }
    Err(Error::PreconditionFailed(format!(
        "{pair} fits none of the three sub-cases"
    )))
}

/// Verdict of the cohomogeneity-two candidate filter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CandidateVerdict {
    KnownPositive,
    KnownAlmostPositiveHomogeneous,
    KnownAlmostPositiveCohomOne,
    NewCandidate,
}

/// Sub-cases of a new candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Subcase {
    #[serde(rename = "2a")]
    S2a,
    #[serde(rename = "2b")]
    S2b,
    #[serde(rename = "2c")]
    S2c,
}

impl fmt::Display for Subcase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subcase::S2a => "2a",
            Subcase::S2b => "2b",
            Subcase::S2c => "2c",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub input_q: Triple,
    /// `q` after the normalizing moves (`sum >= 0`, `q1 >= q2`).
    pub q: Triple,
    /// Moves applied to `((0,0,sum q), q)` to normalize it.
    pub moves: Vec<Move>,
    pub verdict: CandidateVerdict,
    /// Non-empty exactly when `verdict` is `NewCandidate`.
    pub subcases: Vec<Subcase>,
    /// The branch of the decision tree that produced the verdict.
    pub rule: String,
}

pub fn pairwise_coprime(q: Triple) -> bool {
    let q = q.map(|x| x as i128);
    gcd(q[0], q[1]) == 1 && gcd(q[0], q[2]) == 1 && gcd(q[1], q[2]) == 1
}

/// The pair `((0, 0, q1+q2+q3), q)`.
pub fn wilking_pair(q: Triple) -> Result<PQPair> {
    let s = q.iter().map(|&x| x as i128).sum::<i128>();
    PQPair::new([0, 0, check_bound(s, DEFAULT_ENTRY_LIMIT)?], q)
}

/// Decides whether `((0,0,sum q), q)` is a new candidate for almost positive
/// curvature under the Wilking metric, following the known-examples case split.
pub fn wilking_candidate_filter(q: Triple) -> Result<CandidateReport> {
    if !pairwise_coprime(q) {
        return Err(Error::NotPairwiseCoprime(q));
    }
    let mut pair = wilking_pair(q)?;
    let mut moves = Vec::new();
    if pair.p[2] < 0 {
        pair = apply_move(&pair, Move::Negate)?;
        moves.push(Move::Negate);
    }
    if pair.q[0] < pair.q[1] {
        pair = apply_move(&pair, Move::PermQ(Perm3::T12))?;
        moves.push(Move::PermQ(Perm3::T12));
    }
    let nq = pair.q;
    let [q1, q2, q3] = nq.map(|x| x as i128);
    let sum = q1 + q2 + q3;
    let is_perm_of = |target: [i128; 3]| {
        let mut a = [q1, q2, q3];
        let mut b = target;
        a.sort();
        b.sort();
        a == b
    };

    let done = |verdict, rule: &str| {
        Ok(CandidateReport {
            input_q: q,
            q: nq,
            moves: moves.clone(),
            verdict,
            subcases: Vec::new(),
            rule: rule.to_string(),
        })
    };
    use CandidateVerdict::*;
    if sum == 0 {
        return if is_perm_of([1, -1, 0]) {
            done(KnownAlmostPositiveHomogeneous, "homogeneous: sum = 0, Wilking's example")
        } else {
            done(KnownPositive, "homogeneous: sum = 0")
        };
    }
    if q1 == q2 {
        return if is_perm_of([1, 1, 0]) {
            done(KnownAlmostPositiveCohomOne, "cohomogeneity one: q1 = q2, Kerin's example")
        } else {
            done(KnownPositive, "cohomogeneity one: q1 = q2")
        };
    }
    if q1 == 0 || q2 == 0 || q3 == 0 {
        return if is_perm_of([1, 1, 0]) {
            done(KnownAlmostPositiveCohomOne, "some q_i = 0: permutation of (1,1,0)")
        } else {
            done(KnownAlmostPositiveHomogeneous, "some q_i = 0: permutation of (1,-1,0)")
        };
    }
    if q1 > 0 && q2 > 0 && q3 > 0 {
        return done(KnownPositive, "all q_i > 0");
    }
    if q1 < 0 {
        return done(KnownPositive, "q1 < 0 forces q2 < 0 < q3");
    }
    if q2 < 0 && q3 < 0 {
        return done(KnownPositive, "q2, q3 < 0");
    }
    let mut subcases = Vec::new();
    if q2 + q3 >= 0 {
        subcases.push(Subcase::S2a);
    }
    if q2 < 0 && q1 + q2 >= 0 {
        subcases.push(Subcase::S2b);
    }
    if q3 < 0 && q1 + q3 > 0 {
        subcases.push(Subcase::S2c);
    }
    if subcases.is_empty() {
        return done(KnownPositive, "conditions 1a-1d hold but none of 2a-2c: no q_i in [0, p3]");
    }
    Ok(CandidateReport {
        input_q: q,
        q: nq,
        moves,
        verdict: NewCandidate,
        subcases,
        rule: "conditions 1a-1d hold".to_string(),
    })
}
