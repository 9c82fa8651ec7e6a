//! JSON wire formats. Floats are written with 17 significant digits so that
//! every `f64` survives a round trip.

use std::io;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};

use crate::cpmaps::ChoiMap;
use crate::densities::{Density, PermutationMixture};
use crate::error::{Error, Result};
use crate::games::{Game, Graph};
use crate::linalg::{CMatrix, Complex64};
use crate::quantum_perm::{Block, ProjectiveSystem};
use crate::vect::VectorStrategy;

/// Complex number as `[re, im]`.
pub type Pair = [f64; 2];

fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

struct Precise<F>(F);

impl<F: Formatter> Formatter for Precise<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes with 17 significant digits per float.
pub fn to_json<T: Serialize + ?Sized>(value: &T, pretty: bool) -> String {
    let mut buf = Vec::new();
    let result = if pretty {
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, Precise(PrettyFormatter::new()));
        value.serialize(&mut ser)
    } else {
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, Precise(CompactFormatter));
        value.serialize(&mut ser)
    };
    result.expect("serializing plain data cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn from_json<T: DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
}

fn expect_len<T>(v: &[T], len: usize, what: &str) -> Result<()> {
    if v.len() != len {
        return Err(Error::Format(format!("{what}: expected {len} entries, found {}", v.len())));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> Self {
        Self {
            n: g.n(),
            edges: g.edges().into_iter().map(|(i, j)| [i, j]).collect(),
        }
    }
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(j: GraphJson) -> Result<Graph> {
        let edges: Vec<(usize, usize)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::new(j.n, &edges)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameLabels {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameJson {
    #[serde(rename = "nA")]
    pub n_a: usize,
    #[serde(rename = "nB")]
    pub n_b: usize,
    #[serde(rename = "kA")]
    pub k_a: usize,
    #[serde(rename = "kB")]
    pub k_b: usize,
    pub zeros: Vec<[usize; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<GameLabels>,
}

impl From<&Game> for GameJson {
    fn from(g: &Game) -> Self {
        let (n_a, n_b, k_a, k_b) = g.shape();
        let labels = match (g.input_labels(), g.output_labels()) {
            (Some(i), Some(o)) => Some(GameLabels {
                inputs: i.to_vec(),
                outputs: o.to_vec(),
            }),
            _ => None,
        };
        Self {
            n_a,
            n_b,
            k_a,
            k_b,
            zeros: g.zeros(),
            labels,
        }
    }
}

impl TryFrom<GameJson> for Game {
    type Error = Error;

    fn try_from(j: GameJson) -> Result<Game> {
        let g = Game::from_zeros(j.n_a, j.n_b, j.k_a, j.k_b, &j.zeros)?;
        match j.labels {
            Some(l) => g.with_labels(l.inputs, l.outputs),
            None => Ok(g),
        }
    }
}

/// Square densities use `n` and `k`; others carry all four sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, rename = "nA", skip_serializing_if = "Option::is_none")]
    pub n_a: Option<usize>,
    #[serde(default, rename = "nB", skip_serializing_if = "Option::is_none")]
    pub n_b: Option<usize>,
    #[serde(default, rename = "kA", skip_serializing_if = "Option::is_none")]
    pub k_a: Option<usize>,
    #[serde(default, rename = "kB", skip_serializing_if = "Option::is_none")]
    pub k_b: Option<usize>,
    /// `p[x][y][a][b]`.
    pub p: Vec<Vec<Vec<Vec<f64>>>>,
}

impl From<&Density> for DensityJson {
    fn from(d: &Density) -> Self {
        let (n_a, n_b, k_a, k_b) = d.shape();
        let p = (0..n_a)
            .map(|x| {
                (0..n_b)
                    .map(|y| (0..k_a).map(|a| (0..k_b).map(|b| d.p(a, b, x, y)).collect()).collect())
                    .collect()
            })
            .collect();
        let square = n_a == n_b && k_a == k_b;
        let some_if = |cond: bool, v: usize| cond.then_some(v);
        Self {
            n: some_if(square, n_a),
            k: some_if(square, k_a),
            n_a: some_if(!square, n_a),
            n_b: some_if(!square, n_b),
            k_a: some_if(!square, k_a),
            k_b: some_if(!square, k_b),
            p,
        }
    }
}

impl TryFrom<DensityJson> for Density {
    type Error = Error;

    fn try_from(j: DensityJson) -> Result<Density> {
        let (n_a, n_b, k_a, k_b) = match (j.n, j.k, j.n_a, j.n_b, j.k_a, j.k_b) {
            (Some(n), Some(k), None, None, None, None) => (n, n, k, k),
            (None, None, Some(na), Some(nb), Some(ka), Some(kb)) => (na, nb, ka, kb),
            _ => {
                return Err(Error::Format(
                    "density needs either \"n\" and \"k\" or all of \"nA\", \"nB\", \"kA\", \"kB\"".into(),
                ))
            }
        };
        expect_len(&j.p, n_a, "p")?;
        let mut flat = Vec::with_capacity(n_a * n_b * k_a * k_b);
        for (x, px) in j.p.iter().enumerate() {
            expect_len(px, n_b, &format!("p[{x}]"))?;
            for (y, pxy) in px.iter().enumerate() {
                expect_len(pxy, k_a, &format!("p[{x}][{y}]"))?;
                for (a, row) in pxy.iter().enumerate() {
                    expect_len(row, k_b, &format!("p[{x}][{y}][{a}]"))?;
                    flat.extend_from_slice(row);
                }
            }
        }
        Density::new(n_a, n_b, k_a, k_b, flat)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectJson {
    pub n: usize,
    /// Defaults to `n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub m: usize,
    /// `h[x][a]`, each a list of `m` complex entries.
    pub h: Vec<Vec<Vec<Pair>>>,
}

impl From<&VectorStrategy> for VectJson {
    fn from(v: &VectorStrategy) -> Self {
        let h = (0..v.n())
            .map(|x| {
                (0..v.k())
                    .map(|a| v.vector(x, a).iter().copied().map(pair).collect())
                    .collect()
            })
            .collect();
        Self {
            n: v.n(),
            k: (v.k() != v.n()).then_some(v.k()),
            m: v.m(),
            h,
        }
    }
}

impl TryFrom<VectJson> for VectorStrategy {
    type Error = Error;

    fn try_from(j: VectJson) -> Result<VectorStrategy> {
        let k = j.k.unwrap_or(j.n);
        expect_len(&j.h, j.n, "h")?;
        let mut vs = Vec::with_capacity(j.n * k);
        for (x, row) in j.h.into_iter().enumerate() {
            expect_len(&row, k, &format!("h[{x}]"))?;
            for v in row {
                vs.push(v.into_iter().map(complex).collect());
            }
        }
        VectorStrategy::new(j.n, k, j.m, vs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockJson {
    pub d: usize,
    pub weight: f64,
    /// `E[x][a][i][j]`.
    #[serde(rename = "E")]
    pub e: Vec<Vec<Vec<Vec<Pair>>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QPermJson {
    pub n: usize,
    pub k: usize,
    pub blocks: Vec<BlockJson>,
}

fn matrix_rows(m: &CMatrix) -> Vec<Vec<Pair>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| pair(m[(i, j)])).collect()).collect()
}

fn matrix_from_rows(rows: Vec<Vec<Pair>>, d: usize, what: &str) -> Result<CMatrix> {
    expect_len(&rows, d, what)?;
    let mut data = Vec::with_capacity(d * d);
    for (i, r) in rows.into_iter().enumerate() {
        expect_len(&r, d, &format!("{what} row {i}"))?;
        data.extend(r.into_iter().map(complex));
    }
    CMatrix::from_vec(d, d, data)
}

impl From<&ProjectiveSystem> for QPermJson {
    fn from(s: &ProjectiveSystem) -> Self {
        let k = s.k();
        let blocks = s
            .blocks()
            .iter()
            .map(|b| BlockJson {
                d: b.d(),
                weight: b.weight(),
                e: (0..s.n())
                    .map(|x| (0..k).map(|a| matrix_rows(&b.grid()[x * k + a])).collect())
                    .collect(),
            })
            .collect();
        Self { n: s.n(), k, blocks }
    }
}

impl TryFrom<QPermJson> for ProjectiveSystem {
    type Error = Error;

    fn try_from(j: QPermJson) -> Result<ProjectiveSystem> {
        let mut blocks = Vec::with_capacity(j.blocks.len());
        for (bi, b) in j.blocks.into_iter().enumerate() {
            if b.d == 0 {
                return Err(Error::Format(format!("block {bi} has d = 0")));
            }
            expect_len(&b.e, j.n, &format!("blocks[{bi}].E"))?;
            let mut grid = Vec::with_capacity(j.n * j.k);
            for (x, row) in b.e.into_iter().enumerate() {
                expect_len(&row, j.k, &format!("blocks[{bi}].E[{x}]"))?;
                for (a, m) in row.into_iter().enumerate() {
                    grid.push(matrix_from_rows(m, b.d, &format!("blocks[{bi}].E[{x}][{a}]"))?);
                }
            }
            blocks.push(Block::new(b.d, b.weight, grid));
        }
        ProjectiveSystem::new(j.n, j.k, blocks)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoiJson {
    pub n: usize,
    pub k: usize,
    /// Row-major `(nk) x (nk)` entries.
    pub choi: Vec<Pair>,
}

impl From<&ChoiMap> for ChoiJson {
    fn from(m: &ChoiMap) -> Self {
        Self {
            n: m.n(),
            k: m.k(),
            choi: m.choi().as_slice().iter().copied().map(pair).collect(),
        }
    }
}

impl TryFrom<ChoiJson> for ChoiMap {
    type Error = Error;

    fn try_from(j: ChoiJson) -> Result<ChoiMap> {
        let dim = j.n * j.k;
        if dim == 0 {
            return Err(Error::Format("Choi map needs n, k >= 1".into()));
        }
        expect_len(&j.choi, dim * dim, "choi")?;
        let data = j.choi.into_iter().map(complex).collect();
        ChoiMap::from_choi(j.n, j.k, CMatrix::from_vec(dim, dim, data)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub entries: Vec<Pair>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.as_slice().iter().copied().map(pair).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<CMatrix> {
        if j.rows == 0 || j.cols == 0 {
            return Err(Error::Format("matrix needs rows, cols >= 1".into()));
        }
        CMatrix::from_vec(j.rows, j.cols, j.entries.into_iter().map(complex).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureJson {
    pub n: usize,
    pub weights: Vec<f64>,
    pub permutations: Vec<Vec<usize>>,
}

impl From<&PermutationMixture> for MixtureJson {
    fn from(m: &PermutationMixture) -> Self {
        Self {
            n: m.n(),
            weights: m.weights().to_vec(),
            permutations: m.permutations().to_vec(),
        }
    }
}

impl TryFrom<MixtureJson> for PermutationMixture {
    type Error = Error;

    fn try_from(j: MixtureJson) -> Result<PermutationMixture> {
        if j.permutations.iter().any(|p| p.len() != j.n) {
            return Err(Error::Format(format!("every permutation must act on {} points", j.n)));
        }
        PermutationMixture::new(j.weights, j.permutations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_perm::QuantumPermutation;

    fn round_trip<J, T>(value: &T) -> T
    where
        for<'a> J: From<&'a T> + Serialize + DeserializeOwned + TryInto<T, Error = Error>,
    {
        let s = to_json(&J::from(value), false);
        from_json::<J>(&s).unwrap().try_into().unwrap()
    }

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_json(&[0.1f64, 1.0 / 3.0, -2.5e-300], false);
        assert_eq!(s, "[1.0000000000000001e-1,3.3333333333333331e-1,-2.5000000000000000e-300]");
        let back: Vec<f64> = from_json(&s).unwrap();
        assert_eq!(back, vec![0.1, 1.0 / 3.0, -2.5e-300]);
        assert!(to_json(&[1.0f64], true).contains("1.0000000000000000e0"));
    }

    #[test]
    fn round_trips() {
        let g = Graph::cycle(5);
        assert_eq!(round_trip::<GraphJson, _>(&g), g);
        let game = crate::games::iso_game(&Graph::cycle(4), &Graph::path(4));
        assert_eq!(round_trip::<GameJson, _>(&game), game);
        let d = Density::z3_counterexample();
        assert_eq!(round_trip::<DensityJson, _>(&d), d);
        let rect = Density::from_fn(2, 3, 2, 1, |a, b, x, y| (a + b + x + y) as f64 / 7.0);
        assert_eq!(round_trip::<DensityJson, _>(&rect), rect);
        let theta = 0.37f64;
        let p = CMatrix::from_real_rows(&[&[theta.cos().powi(2), theta.cos() * theta.sin()], &[theta.cos() * theta.sin(), theta.sin().powi(2)]]);
        let u = QuantumPermutation::block_pair(&p, &CMatrix::diag_real(&[0.0, 1.0]), 1e-9).unwrap();
        assert_eq!(&round_trip::<QPermJson, _>(u.system()), u.system());
        let v = crate::vect::vect_from_projective(u.system(), 1e-9).unwrap();
        assert_eq!(round_trip::<VectJson, _>(&v), v);
        let m = crate::cpmaps::phi_from_density(&u.induced_density()).unwrap();
        assert_eq!(round_trip::<ChoiJson, _>(&m), m);
        assert_eq!(round_trip::<MatrixJson, _>(&p), p);
        let mix = PermutationMixture::new(vec![0.3, 0.7], vec![vec![1, 0, 2], vec![2, 1, 0]]).unwrap();
        assert_eq!(round_trip::<MixtureJson, _>(&mix), mix);
    }

    #[test]
    fn density_format_errors() {
        let bad = r#"{"n":2,"k":2,"p":[[[[1,0],[0,0]]]]}"#;
        assert!(matches!(
            from_json::<DensityJson>(bad).and_then(Density::try_from),
            Err(Error::Format(_))
        ));
        let mixed = r#"{"n":1,"kA":1,"p":[[[[1]]]]}"#;
        assert!(matches!(
            from_json::<DensityJson>(mixed).and_then(Density::try_from),
            Err(Error::Format(_))
        ));
        assert!(matches!(from_json::<DensityJson>("{"), Err(Error::Format(_))));
    }
}
