//! Oracles and fixtures shared by the integration tests. The oracles do
//! not call into the dispatcher or the sparse kernels; only
//! [`check_sequences`] drives the dispatcher, comparing it against them.

#![allow(dead_code)]

use std::path::PathBuf;

use std::collections::HashSet;

use forid::dispatch::{
    for_id_with_stats, Dispatch, DispatchError, DispatchStats, Element, Kernel1, Kernel2, Kernel3,
    Kernel4, Sequences, TypeSequence, TypeTag,
};
use rand::Rng;

pub fn bundled_matrix() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/sym8.mtx")
}

/// Records the tag tuple of every member invoked.
#[derive(Default)]
pub struct Probe {
    pub calls: Vec<Vec<TypeTag>>,
}

impl Kernel1 for Probe {
    type Output = ();
    fn apply<A: Element>(&mut self) {
        self.calls.push(vec![A::TAG]);
    }
}

impl Kernel2 for Probe {
    type Output = ();
    fn apply<A: Element, B: Element>(&mut self) {
        self.calls.push(vec![A::TAG, B::TAG]);
    }
}

impl Kernel3 for Probe {
    type Output = ();
    fn apply<A: Element, B: Element, C: Element>(&mut self) {
        self.calls.push(vec![A::TAG, B::TAG, C::TAG]);
    }
}

impl Kernel4 for Probe {
    type Output = ();
    fn apply<A: Element, B: Element, C: Element, D: Element>(&mut self) {
        self.calls.push(vec![A::TAG, B::TAG, C::TAG, D::TAG]);
    }
}

/// Advances `digits` through the Cartesian product of `0..lens[i]`, last
/// digit fastest. Returns false after the final combination.
pub fn odometer(digits: &mut [usize], lens: &[usize]) -> bool {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < lens[k] {
            return true;
        }
        digits[k] = 0;
    }
    false
}

/// Every id vector of the product of sequences with the given lengths.
pub fn all_id_vectors(lens: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut digits = vec![0; lens.len()];
    loop {
        out.push(digits.clone());
        if !odometer(&mut digits, lens) {
            return out;
        }
    }
}

/// The naive solution: one branch per member of the Cartesian product,
/// each testing every dimension's condition, tried in order.
pub fn naive_ladder(seqs: &[TypeSequence], ids: &[usize]) -> Option<Vec<TypeTag>> {
    let lens: Vec<usize> = seqs.iter().map(TypeSequence::len).collect();
    let mut branch = vec![0; lens.len()];
    loop {
        if branch.iter().zip(ids).all(|(k, id)| k == id) {
            return Some(branch.iter().zip(seqs).map(|(&k, s)| s.tags()[k]).collect());
        }
        if !odometer(&mut branch, &lens) {
            return None;
        }
    }
}

/// Tallies of [`check_sequences`] over one tuple of sequences.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct GridReport {
    pub lengths: Vec<usize>,
    pub vectors: usize,
    /// Valid id vectors where the probe disagreed with the naive ladder.
    pub oracle_mismatches: usize,
    /// Valid id vectors whose comparison count differed from sum(id + 1).
    pub count_mismatches: usize,
    pub max_comparisons: u64,
    pub sum_of_lengths: u64,
    pub product_of_lengths: u64,
    /// Whether the recorded tuples covered the whole Cartesian product.
    pub reachable: bool,
    pub invalid_cases: usize,
    /// Invalid id vectors with a wrong error, count, or any invocation.
    pub invalid_failures: usize,
}

fn observe<L>(ids: &[usize]) -> (Result<(), DispatchError>, Vec<Vec<TypeTag>>, DispatchStats)
where
    L: Sequences + Dispatch<Probe, Output = ()>,
{
    let ids = L::Ids::try_from(ids)
        .ok()
        .expect("id vector has one id per dimension");
    let mut probe = Probe::default();
    let mut stats = DispatchStats::default();
    let result = for_id_with_stats::<L, _>(&mut probe, ids, &mut stats);
    (result, probe.calls, stats)
}

/// Runs every valid id vector of `L` against the naive ladder, then every
/// vector made invalid in one dimension.
pub fn check_sequences<L>() -> GridReport
where
    L: Sequences + Dispatch<Probe, Output = ()>,
{
    let seqs = L::sequences();
    let lens = L::lengths();
    let mut report = GridReport {
        lengths: lens.clone(),
        sum_of_lengths: lens.iter().map(|&n| n as u64).sum(),
        product_of_lengths: lens.iter().map(|&n| n as u64).product(),
        ..GridReport::default()
    };
    let mut seen = HashSet::new();

    for ids in all_id_vectors(&lens) {
        report.vectors += 1;
        let (result, calls, stats) = observe::<L>(&ids);
        let expected = naive_ladder(&seqs, &ids);
        let ok = result.is_ok()
            && calls.len() == 1
            && Some(&calls[0]) == expected.as_ref()
            && stats.resolved == expected;
        if !ok {
            report.oracle_mismatches += 1;
        }
        let want: u64 = ids.iter().map(|&id| id as u64 + 1).sum();
        if stats.comparisons != want {
            report.count_mismatches += 1;
        }
        report.max_comparisons = report.max_comparisons.max(stats.comparisons);
        seen.extend(calls);

        // Out of range in dimension `bad`; later ids also out of range to
        // show they are never examined.
        for bad in 0..ids.len() {
            for offset in [0, 3] {
                let mut wrong = ids.clone();
                wrong[bad] = lens[bad] + offset;
                for later in wrong.iter_mut().skip(bad + 1) {
                    *later = usize::MAX;
                }
                report.invalid_cases += 1;
                let (result, calls, stats) = observe::<L>(&wrong);
                let want_count: u64 =
                    ids[..bad].iter().map(|&id| id as u64 + 1).sum::<u64>() + lens[bad] as u64;
                let want_err = DispatchError::InvalidId {
                    dimension: bad + 1,
                    id: wrong[bad],
                    len: lens[bad],
                };
                let ok = result == Err(want_err)
                    && calls.is_empty()
                    && stats.comparisons == want_count
                    && stats.resolved.is_none();
                if !ok {
                    report.invalid_failures += 1;
                }
            }
        }
    }

    let product: HashSet<Vec<TypeTag>> = all_id_vectors(&lens)
        .iter()
        .map(|ids| ids.iter().zip(&seqs).map(|(&k, s)| s.tags()[k]).collect())
        .collect();
    report.reachable =
        seen.iter().cloned().collect::<HashSet<_>>() == product && seen.len() == product.len();
    report
}

/// A lower triangle in column-major order: `(row, col, value)`, row >= col.
pub type Triangle = Vec<(usize, usize, f64)>;

/// Random symmetric matrix of order `n`, each lower entry present with
/// probability `density`; the diagonal is always present.
pub fn random_triangle<R: Rng>(rng: &mut R, n: usize, density: f64) -> Triangle {
    let mut t = Vec::new();
    for c in 0..n {
        for r in c..n {
            if r == c || rng.gen_bool(density) {
                t.push((r, c, rng.gen_range(-1.0..1.0)));
            }
        }
    }
    t
}

/// Dense symmetric matrix rebuilt from the stored triangle.
pub fn dense_from_triangle<F: Copy + Default>(n: usize, t: &[(usize, usize, F)]) -> Vec<Vec<F>> {
    let mut a = vec![vec![F::default(); n]; n];
    for &(r, c, v) in t {
        a[r][c] = v;
        a[c][r] = v;
    }
    a
}

/// Row-by-row dense product, accumulating columns in ascending order.
pub fn dense_matvec<F>(a: &[Vec<F>], x: &[F]) -> Vec<F>
where
    F: Copy + Default + std::ops::Add<Output = F> + std::ops::Mul<Output = F>,
{
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(F::default(), |acc, (&v, &xi)| acc + v * xi)
        })
        .collect()
}

/// Dense power method in `f64` with the signed-max normalization.
pub fn dense_power_method(a: &[Vec<f64>], iterations: u64) -> f64 {
    let n = a.len();
    let mut x = vec![1.0; n];
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let y = dense_matvec(a, &x);
        lambda = 0.0;
        for &v in &y {
            if f64::abs(v) > f64::abs(lambda) {
                lambda = v;
            }
        }
        x = y.iter().map(|v| v / lambda).collect();
    }
    lambda
}

/// Distance in units in the last place between two `f64`s of equal sign
/// (or zero).
pub fn ulps_f64(a: f64, b: f64) -> u64 {
    let key = |v: f64| {
        let bits = v.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    };
    key(a).abs_diff(key(b))
}

pub fn ulps_f32(a: f32, b: f32) -> u64 {
    let key = |v: f32| {
        let bits = v.to_bits() as i32;
        if bits < 0 {
            i32::MIN - bits
        } else {
            bits
        }
    };
    u64::from(key(a).abs_diff(key(b)))
}

/// Matrix Market text for a lower triangle.
pub fn triangle_to_mtx(n: usize, t: &[(usize, usize, f64)]) -> String {
    let mut s = format!(
        "%%MatrixMarket matrix coordinate real symmetric\n{} {} {}\n",
        n,
        n,
        t.len()
    );
    for &(r, c, v) in t {
        s.push_str(&format!("{} {} {}\n", r + 1, c + 1, v));
    }
    s
}

/// Prefixes of four element-type families, one family per dimension.
pub mod families {
    use forid::type_seq;

    pub type A1 = type_seq![u8];
    pub type A2 = type_seq![u8, u16];
    pub type A3 = type_seq![u8, u16, u32];
    pub type A4 = type_seq![u8, u16, u32, u64];

    pub type B1 = type_seq![f64];
    pub type B2 = type_seq![f64, f32];
    pub type B3 = type_seq![f64, f32, u64];
    pub type B4 = type_seq![f64, f32, u64, u32];

    pub type C1 = type_seq![u32];
    pub type C2 = type_seq![u32, f32];
    pub type C3 = type_seq![u32, f32, u8];
    pub type C4 = type_seq![u32, f32, u8, f64];

    pub type D1 = type_seq![f32];
    pub type D2 = type_seq![f32, u64];
    pub type D3 = type_seq![f32, u64, f64];
    pub type D4 = type_seq![f32, u64, f64, u16];
}

/// Calls `$out.push($f::<(S1, .., Sd)>())` for every tuple in the
/// Cartesian product of the bracketed option lists.
#[macro_export]
macro_rules! product {
    ($out:ident, $f:ident; $($options:tt)+) => {
        product!(@go $out $f [] [$($options)+])
    };
    (@go $out:ident $f:ident [$($acc:ty),*] []) => {
        $out.push($f::<($($acc,)*)>());
    };
    (@go $out:ident $f:ident $acc:tt [$head:tt $($tail:tt)*]) => {
        product!(@each $out $f $acc $head [$($tail)*]);
    };
    (@each $out:ident $f:ident $acc:tt [] $rest:tt) => {};
    (@each $out:ident $f:ident $acc:tt [$opt:ty $(, $more:ty)*] $rest:tt) => {
        product!(@push $out $f $acc $opt; $rest);
        product!(@each $out $f $acc [$($more),*] $rest);
    };
    (@push $out:ident $f:ident [$($acc:ty),*] $opt:ty; $rest:tt) => {
        product!(@go $out $f [$($acc,)* $opt] $rest);
    };
}

/// All eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (mut rp, mut rq) = (a[p].clone(), a[q].clone());
                for k in 0..n {
                    rp[k] = c * a[p][k] - s * a[q][k];
                    rq[k] = s * a[p][k] + c * a[q][k];
                }
                a[p] = rp;
                a[q] = rq;
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Eigenvalue of largest magnitude.
pub fn dominant_eigenvalue(a: &[Vec<f64>]) -> f64 {
    jacobi_eigenvalues(a).into_iter().fold(
        0.0,
        |best, v| if v.abs() > f64::abs(best) { v } else { best },
    )
}

/// Parses the bundled file independently of the library reader.
pub fn bundled_dense() -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(bundled_matrix()).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('%'));
    let n: usize = lines
        .next()
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    let t: Vec<(usize, usize, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (
                f[0].parse::<usize>().unwrap() - 1,
                f[1].parse::<usize>().unwrap() - 1,
                f[2].parse().unwrap(),
            )
        })
        .collect();
    dense_from_triangle(n, &t)
}

/// A matrix with the shape of nos1 (n = 237, z = 627): the lower
/// bidiagonal plus entries in the last row, in column-major order.
pub fn nos1_shaped() -> (usize, Triangle) {
    let n = 237;
    let mut t = Vec::new();
    for c in 0..n {
        t.push((c, c, 4.0));
        if c + 1 < n {
            t.push((c + 1, c, -1.0));
        }
    }
    let mut c = 0;
    while t.len() < 627 {
        t.push((n - 1, c, 0.5));
        c += 1;
    }
    t.sort_by_key(|e| (e.1, e.0));
    t.dedup_by_key(|e| (e.0, e.1));
    assert_eq!(t.len(), 627);
    (n, t)
}
