//! Exact direction sets: the dodecahedron over `Q(√5)`, the hexagon over
//! `Q(√3)`, and discovery of cubes inscribed in a centrally symmetric vertex
//! set.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::exactnum::{FieldError, QuadNum, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("direction {0} is the zero vector")]
    ZeroVector(String),
    #[error("duplicate direction label {0}")]
    DuplicateLabel(String),
    #[error("direction {label} has squared length {found}, expected {expected}")]
    NormMismatch {
        label: String,
        found: Box<QuadNum>,
        expected: Box<QuadNum>,
    },
    #[error("malformed signed label {0:?}: expected a name followed by + or -")]
    BadLabel(String),
}

/// Which ray of an antipodal pair a label names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Plus,
    Minus,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Plus => Polarity::Minus,
            Polarity::Minus => Polarity::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Polarity::Plus => '+',
            Polarity::Minus => '-',
        }
    }
}

/// A signed label such as `A+` or `J-`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub name: String,
    pub polarity: Polarity,
}

impl Label {
    pub fn new(name: impl Into<String>, polarity: Polarity) -> Self {
        Label {
            name: name.into(),
            polarity,
        }
    }

    pub fn plus(name: impl Into<String>) -> Self {
        Self::new(name, Polarity::Plus)
    }

    pub fn minus(name: impl Into<String>) -> Self {
        Self::new(name, Polarity::Minus)
    }

    pub fn antipode(&self) -> Self {
        Self::new(self.name.clone(), self.polarity.flip())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, self.polarity.symbol())
    }
}

impl FromStr for Label {
    type Err = GeometryError;

    /// Accepts `X+`, `X-` and `X−` (U+2212).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GeometryError::BadLabel(s.to_string());
        let last = s.chars().last().ok_or_else(bad)?;
        let polarity = match last {
            '+' => Polarity::Plus,
            '-' | '\u{2212}' => Polarity::Minus,
            _ => return Err(bad()),
        };
        let name = &s[..s.len() - last.len_utf8()];
        if name.is_empty() || name.ends_with(['+', '-', '\u{2212}']) {
            return Err(bad());
        }
        Ok(Label::new(name, polarity))
    }
}

/// Exact 3-vector whose irrational components share one radicand.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vec3Q {
    x: QuadNum,
    y: QuadNum,
    z: QuadNum,
}

impl Vec3Q {
    pub fn new(x: QuadNum, y: QuadNum, z: QuadNum) -> Result<Self, FieldError> {
        x.common_radicand(&y)?;
        x.common_radicand(&z)?;
        y.common_radicand(&z)?;
        Ok(Vec3Q { x, y, z })
    }

    pub fn from_integers(x: i64, y: i64, z: i64) -> Self {
        Vec3Q {
            x: x.into(),
            y: y.into(),
            z: z.into(),
        }
    }

    pub fn zero() -> Self {
        Self::from_integers(0, 0, 0)
    }

    pub fn components(&self) -> [&QuadNum; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn x(&self) -> &QuadNum {
        &self.x
    }

    pub fn y(&self) -> &QuadNum {
        &self.y
    }

    pub fn z(&self) -> &QuadNum {
        &self.z
    }

    /// Common radicand of the components; 1 when all are rational.
    pub fn radicand(&self) -> u64 {
        self.components()
            .iter()
            .map(|c| c.radicand())
            .find(|&d| d != 1)
            .unwrap_or(1)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn dot(&self, other: &Self) -> Result<QuadNum, FieldError> {
        self.x
            .try_mul(&other.x)?
            .try_add(&self.y.try_mul(&other.y)?)?
            .try_add(&self.z.try_mul(&other.z)?)
    }

    pub fn norm_sq(&self) -> QuadNum {
        // Components already share a radicand.
        self.dot(self).expect("components share a radicand")
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, FieldError> {
        Vec3Q::new(
            self.x.try_add(&other.x)?,
            self.y.try_add(&other.y)?,
            self.z.try_add(&other.z)?,
        )
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Vec3Q {
            x: self.x.scale(q),
            y: self.y.scale(q),
            z: self.z.scale(q),
        }
    }

    pub fn scale_by(&self, s: &QuadNum) -> Result<Self, FieldError> {
        Vec3Q::new(self.x.try_mul(s)?, self.y.try_mul(s)?, self.z.try_mul(s)?)
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [self.x.to_f64(), self.y.to_f64(), self.z.to_f64()]
    }

    /// Lexicographic order on exact component values.
    pub fn cmp_lex(&self, other: &Self) -> Result<Ordering, FieldError> {
        for (a, b) in self.components().into_iter().zip(other.components()) {
            match a.cmp_value(b)? {
                Ordering::Equal => continue,
                ord => return Ok(ord),
            }
        }
        Ok(Ordering::Equal)
    }
}

impl core::ops::Neg for &Vec3Q {
    type Output = Vec3Q;
    fn neg(self) -> Vec3Q {
        Vec3Q {
            x: -&self.x,
            y: -&self.y,
            z: -&self.z,
        }
    }
}

impl fmt::Display for Vec3Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl fmt::Debug for Vec3Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vec3Q{self}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedVertex {
    pub label: Label,
    pub coords: Vec3Q,
}

impl DirectedVertex {
    pub fn antipode(&self) -> Self {
        DirectedVertex {
            label: self.label.antipode(),
            coords: -&self.coords,
        }
    }
}

/// A centrally symmetric set of labeled vertices on a common sphere.
///
/// Stored as `X+, X-` pairs in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    vertices: Vec<DirectedVertex>,
    norm_sq: QuadNum,
}

impl VertexSet {
    /// Builds the set from the `+` ray of each antipodal pair.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self, GeometryError>
    where
        I: IntoIterator<Item = (S, Vec3Q)>,
        S: Into<String>,
    {
        let mut vertices: Vec<DirectedVertex> = Vec::new();
        let mut norm_sq: Option<QuadNum> = None;
        for (name, coords) in pairs {
            let name = name.into();
            if coords.is_zero() {
                return Err(GeometryError::ZeroVector(name));
            }
            if vertices.iter().any(|v| v.label.name == name) {
                return Err(GeometryError::DuplicateLabel(name));
            }
            let n = coords.norm_sq();
            match &norm_sq {
                None => norm_sq = Some(n),
                Some(expected) if *expected != n => {
                    return Err(GeometryError::NormMismatch {
                        label: name,
                        found: Box::new(n),
                        expected: Box::new(expected.clone()),
                    })
                }
                Some(_) => {}
            }
            let plus = DirectedVertex {
                label: Label::plus(name),
                coords,
            };
            let minus = plus.antipode();
            vertices.push(plus);
            vertices.push(minus);
        }
        Ok(VertexSet {
            vertices,
            norm_sq: norm_sq.unwrap_or_else(QuadNum::zero),
        })
    }

    pub fn vertices(&self) -> &[DirectedVertex] {
        &self.vertices
    }

    pub fn norm_sq(&self) -> &QuadNum {
        &self.norm_sq
    }

    pub fn pair_count(&self) -> usize {
        self.vertices.len() / 2
    }

    /// The `+` vertex of each antipodal pair.
    pub fn representatives(&self) -> impl Iterator<Item = &DirectedVertex> {
        self.vertices.iter().step_by(2)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.representatives().map(|v| v.label.name.as_str())
    }

    pub fn get(&self, label: &Label) -> Option<&DirectedVertex> {
        self.vertices.iter().find(|v| &v.label == label)
    }

    pub fn radicand(&self) -> u64 {
        self.vertices
            .iter()
            .map(|v| v.coords.radicand())
            .find(|&d| d != 1)
            .unwrap_or(1)
    }
}

/// Letters used for builtin vertex sets, in assignment order.
const LETTERS: [&str; 10] = ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J"];

/// The 20 dodecahedron vertices over `Q(√5)` with squared length 3:
/// `(±1, ±1, ±1)` and the cyclic permutations of `(0, ±1/φ, ±φ)`.
///
/// Labels: of each antipodal pair the lexicographically larger coordinate
/// triple is the `+` ray; the `+` rays, sorted in decreasing lexicographic
/// order, are named `A` through `J`.
pub fn dodecahedron_vertices() -> VertexSet {
    let phi = QuadNum::golden_ratio();
    let inv_phi = phi.try_sub(&QuadNum::one()).expect("same field");
    let signs = [1i64, -1];

    let mut points: Vec<Vec3Q> = Vec::with_capacity(20);
    for sx in signs {
        for sy in signs {
            for sz in signs {
                points.push(Vec3Q::from_integers(sx, sy, sz));
            }
        }
    }
    for s1 in signs {
        for s2 in signs {
            let a = inv_phi.scale(&Rational::from(s1));
            let b = phi.scale(&Rational::from(s2));
            let zero = QuadNum::zero();
            points.push(Vec3Q::new(zero.clone(), a.clone(), b.clone()).expect("Q(√5)"));
            points.push(Vec3Q::new(a.clone(), b.clone(), zero.clone()).expect("Q(√5)"));
            points.push(Vec3Q::new(b, zero, a).expect("Q(√5)"));
        }
    }
    labeled_from_points(points)
}

/// Pairs up a centrally symmetric point list and names the pairs by the
/// ordering documented on [`dodecahedron_vertices`].
fn labeled_from_points(points: Vec<Vec3Q>) -> VertexSet {
    let lex = |a: &Vec3Q, b: &Vec3Q| a.cmp_lex(b).expect("single field");
    let mut reps: Vec<Vec3Q> = points
        .into_iter()
        .filter(|p| lex(p, &-p) == Ordering::Greater)
        .collect();
    reps.sort_by(|a, b| lex(b, a));
    VertexSet::from_pairs(LETTERS.iter().copied().zip(reps)).expect("valid construction")
}

/// Three directions 60° apart in the `z = 0` plane over `Q(√3)`:
/// `A = (2, 0, 0)`, `B = (1, √3, 0)`, `C = (-1, √3, 0)`, squared length 4.
pub fn hexagon_directions() -> VertexSet {
    let s3 = QuadNum::sqrt_of(3).expect("3 is square-free");
    let zero = QuadNum::zero();
    let pairs = [
        ("A", Vec3Q::from_integers(2, 0, 0)),
        (
            "B",
            Vec3Q::new(1.into(), s3.clone(), zero.clone()).expect("Q(√3)"),
        ),
        ("C", Vec3Q::new((-1).into(), s3, zero).expect("Q(√3)")),
    ];
    VertexSet::from_pairs(pairs).expect("valid construction")
}

pub fn dot(u: &Vec3Q, v: &Vec3Q) -> Result<QuadNum, FieldError> {
    u.dot(v)
}

pub fn antipode(v: &DirectedVertex) -> DirectedVertex {
    v.antipode()
}

/// Eight vertices of a vertex set that form a cube: four antipodal pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeSubset {
    pair_names: [String; 4],
}

impl CubeSubset {
    pub fn pair_names(&self) -> &[String; 4] {
        &self.pair_names
    }

    /// `X+, X-` for each pair, in pair order.
    pub fn member_labels(&self) -> Vec<Label> {
        self.pair_names
            .iter()
            .flat_map(|n| [Label::plus(n.as_str()), Label::minus(n.as_str())])
            .collect()
    }

    /// Names of antipodal pairs shared with another cube.
    pub fn shared_pairs<'a>(&'a self, other: &'a CubeSubset) -> Vec<&'a str> {
        self.pair_names
            .iter()
            .filter(|n| other.pair_names.contains(n))
            .map(String::as_str)
            .collect()
    }

    /// Validates `names` against the cube signature in `vs`.
    pub fn from_names(vs: &VertexSet, names: [&str; 4]) -> Option<Self> {
        let members: Vec<&DirectedVertex> = names
            .iter()
            .flat_map(|n| [Label::plus(*n), Label::minus(*n)])
            .map(|l| vs.get(&l))
            .collect::<Option<_>>()?;
        is_cube_signature(&members, vs.norm_sq()).then(|| CubeSubset {
            pair_names: names.map(String::from),
        })
    }
}

/// Every vertex of a cube on a sphere of squared radius `r` sees the other
/// vertices at dot products `r` (itself), `r/3` (three neighbours), `-r/3`
/// (three) and `-r` (its antipode).
pub fn is_cube_signature(members: &[&DirectedVertex], norm_sq: &QuadNum) -> bool {
    if members.len() != 8 || norm_sq.is_zero() {
        return false;
    }
    let third = norm_sq.scale(&Rational::frac(1, 3));
    let targets = [
        (norm_sq.clone(), 1usize),
        (third.clone(), 3),
        (-&third, 3),
        (-norm_sq, 1),
    ];
    members.iter().all(|v| {
        let mut counts = [0usize; 4];
        for w in members {
            let Ok(d) = v.coords.dot(&w.coords) else {
                return false;
            };
            match targets.iter().position(|(t, _)| *t == d) {
                Some(i) => counts[i] += 1,
                None => return false,
            }
        }
        counts.iter().zip(&targets).all(|(c, (_, want))| c == want)
    })
}

/// All inscribed cubes, by exhaustive search over 4-subsets of antipodal
/// pairs in lexicographic index order.
pub fn find_inscribed_cubes(vs: &VertexSet) -> Vec<CubeSubset> {
    let reps: Vec<&DirectedVertex> = vs.representatives().collect();
    let n = reps.len();
    let mut cubes = Vec::new();
    if n < 4 {
        return cubes;
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let idx = [a, b, c, d];
                    let members: Vec<&DirectedVertex> = idx
                        .iter()
                        .flat_map(|&i| [&vs.vertices[2 * i], &vs.vertices[2 * i + 1]])
                        .collect();
                    if is_cube_signature(&members, vs.norm_sq()) {
                        cubes.push(CubeSubset {
                            pair_names: idx.map(|i| reps[i].label.name.clone()),
                        });
                    }
                }
            }
        }
    }
    cubes
}

/// The cube with vertices `(±1, ±1, ±1)` among the dodecahedron vertices.
pub fn axis_aligned_cube(vs: &VertexSet) -> Option<CubeSubset> {
    let is_unit = |v: &DirectedVertex| {
        v.coords.components().iter().all(|c| {
            c.as_rational()
                .is_some_and(|q| q.square() == Rational::one())
        })
    };
    let names: Vec<&str> = vs
        .representatives()
        .filter(|v| is_unit(v))
        .map(|v| v.label.name.as_str())
        .collect();
    let names: [&str; 4] = names.try_into().ok()?;
    CubeSubset::from_names(vs, names)
}
