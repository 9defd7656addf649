//! Gauss–Legendre and Gauss–Lobatto rules on the reference interval [0, 1].
//!
//! Nodes and weights are tabulated to 22 significant digits for up to eight
//! points, so every rule is bit-stable across platforms.

use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule1D {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule1D {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Approximates `∫₀¹ g`.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(t, w)| w * g(t)).sum()
    }

    fn from_table(table: &[(f64, f64)]) -> Self {
        QuadratureRule1D {
            nodes: table.iter().map(|p| p.0).collect(),
            weights: table.iter().map(|p| p.1).collect(),
        }
    }
}

/// `n`-point Gauss–Legendre rule, exact for degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule1D> {
    if !(1..=8).contains(&n) {
        return Err(Error::UnsupportedRule { kind: "Gauss-Legendre", points: n });
    }
    Ok(QuadratureRule1D::from_table(GAUSS_LEGENDRE[n - 1]))
}

/// `n`-point Gauss–Lobatto rule including both endpoints, exact for degree `2n - 3`.
pub fn gauss_lobatto(n: usize) -> Result<QuadratureRule1D> {
    if !(2..=8).contains(&n) {
        return Err(Error::UnsupportedRule { kind: "Gauss-Lobatto", points: n });
    }
    Ok(QuadratureRule1D::from_table(GAUSS_LOBATTO[n - 2]))
}

/// Tensor-product rule on [0, 1]².
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule2D {
    points: Vec<(f64, f64)>,
    weights: Vec<f64>,
}

impl QuadratureRule2D {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&(x, y), w)| w * g(x, y)).sum()
    }
}

/// Points are ordered with `x` varying fastest.
pub fn tensorize(rule: &QuadratureRule1D) -> QuadratureRule2D {
    let n = rule.len();
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (y, wy) in rule.iter() {
        for (x, wx) in rule.iter() {
            points.push((x, y));
            weights.push(wx * wy);
        }
    }
    QuadratureRule2D { points, weights }
}

const GAUSS_LEGENDRE: [&[(f64, f64)]; 8] = [
    &[
        (0.5, 1.0),
    ],
    &[
        (0.2113248654051871177454, 0.5),
        (0.7886751345948128822546, 0.5),
    ],
    &[
        (0.1127016653792583114821, 0.2777777777777777777778),
        (0.5, 0.4444444444444444444444),
        (0.8872983346207416885179, 0.2777777777777777777778),
    ],
    &[
        (0.06943184420297371238803, 0.1739274225687269286865),
        (0.3300094782075718675987, 0.3260725774312730713135),
        (0.6699905217924281324013, 0.3260725774312730713135),
        (0.930568155797026287612, 0.1739274225687269286865),
    ],
    &[
        (0.04691007703066800360119, 0.1184634425280945437571),
        (0.2307653449471584544818, 0.2393143352496832340206),
        (0.5, 0.2844444444444444444444),
        (0.7692346550528415455182, 0.2393143352496832340206),
        (0.9530899229693319963988, 0.1184634425280945437571),
    ],
    &[
        (0.03376524289842398609385, 0.08566224618958517252015),
        (0.1693953067668677431693, 0.1803807865240693037849),
        (0.3806904069584015456847, 0.2339569672863455236949),
        (0.6193095930415984543153, 0.2339569672863455236949),
        (0.8306046932331322568307, 0.1803807865240693037849),
        (0.9662347571015760139062, 0.08566224618958517252015),
    ],
    &[
        (0.02544604382862073773691, 0.06474248308443484663531),
        (0.1292344072003027800681, 0.1398526957446383339507),
        (0.2970774243113014165467, 0.1909150252525594724752),
        (0.5, 0.2089795918367346938776),
        (0.7029225756886985834533, 0.1909150252525594724752),
        (0.8707655927996972199319, 0.1398526957446383339507),
        (0.9745539561713792622631, 0.06474248308443484663531),
    ],
    &[
        (0.01985507175123188415822, 0.05061426814518812957627),
        (0.1016667612931866302042, 0.1111905172266872352722),
        (0.2372337950418355070911, 0.156853322938943643669),
        (0.4082826787521750975303, 0.1813418916891809914826),
        (0.5917173212478249024697, 0.1813418916891809914826),
        (0.7627662049581644929089, 0.156853322938943643669),
        (0.8983332387068133697958, 0.1111905172266872352722),
        (0.9801449282487681158418, 0.05061426814518812957627),
    ],
];
const GAUSS_LOBATTO: [&[(f64, f64)]; 7] = [
    &[
        (0.0, 0.5),
        (1.0, 0.5),
    ],
    &[
        (0.0, 0.1666666666666666666667),
        (0.5, 0.6666666666666666666667),
        (1.0, 0.1666666666666666666667),
    ],
    &[
        (0.0, 0.08333333333333333333333),
        (0.2763932022500210303591, 0.4166666666666666666667),
        (0.7236067977499789696409, 0.4166666666666666666667),
        (1.0, 0.08333333333333333333333),
    ],
    &[
        (0.0, 0.05),
        (0.1726731646460114281009, 0.2722222222222222222222),
        (0.5, 0.3555555555555555555556),
        (0.8273268353539885718991, 0.2722222222222222222222),
        (1.0, 0.05),
    ],
    &[
        (0.0, 0.03333333333333333333333),
        (0.1174723380352676535745, 0.1892374781489234901583),
        (0.3573842417596774518429, 0.2774291885177431765084),
        (0.6426157582403225481571, 0.2774291885177431765084),
        (0.8825276619647323464255, 0.1892374781489234901583),
        (1.0, 0.03333333333333333333333),
    ],
    &[
        (0.0, 0.02380952380952380952381),
        (0.08488805186071653506398, 0.1384130236807829740054),
        (0.2655756032646428930981, 0.2158726906049313117089),
        (0.5, 0.2438095238095238095238),
        (0.7344243967353571069019, 0.2158726906049313117089),
        (0.915111948139283464936, 0.1384130236807829740054),
        (1.0, 0.02380952380952380952381),
    ],
    &[
        (0.0, 0.01785714285714285714286),
        (0.06412992574519669233128, 0.1053521135717530196915),
        (0.2041499092834288489277, 0.1705613462417521823821),
        (0.3953503910487605656157, 0.2062293973293519407835),
        (0.6046496089512394343843, 0.2062293973293519407835),
        (0.7958500907165711510723, 0.1705613462417521823821),
        (0.9358700742548033076687, 0.1053521135717530196915),
        (1.0, 0.01785714285714285714286),
    ],
];
