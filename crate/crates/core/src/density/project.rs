//! Mod-1 projection `g†(x) = Σₖ g(x + k)` and wrap-around translation.

use super::{compensated_sum, Mod1Density, Piece, PieceShape, PiecewiseDensity};

/// Breakpoints closer than this are treated as one.
const SNAP: f64 = 1e-12;

/// Grid density (points per unit length) used when overlapping fragments
/// cannot be combined in closed form.
pub const OVERLAP_GRID: usize = 4096;

/// Projects `g` onto `[0, 1)` by cutting every piece at the integers and
/// stacking the fragments.
pub fn mod1_project(g: &PiecewiseDensity) -> Mod1Density {
    let mut fragments = Vec::new();
    for piece in g.pieces() {
        let first = piece.lo.floor() as i64;
        let last = piece.hi.ceil() as i64 - 1;
        for k in first..=last {
            let kf = k as f64;
            for part in piece.restrict(kf, kf + 1.0) {
                let lo = (part.lo - kf).clamp(0.0, 1.0);
                let hi = (part.hi - kf).clamp(0.0, 1.0);
                fragments.push(Piece { lo, hi, ..part });
            }
        }
    }
    Mod1Density::from_parts(stack(fragments))
}

/// Mod-1 projection of `x ↦ g†(x − t)`.
pub fn translate_mod1(g_dag: &Mod1Density, t: f64) -> Mod1Density {
    let mut shift = t.rem_euclid(1.0);
    if shift >= 1.0 {
        shift = 0.0;
    }
    if shift == 0.0 {
        return g_dag.clone();
    }
    mod1_project(&g_dag.density().translate(shift))
}

/// Canonical breakpoints: sorted, with clusters closer than [`SNAP`]
/// collapsed onto one representative (0 and 1 win their clusters).
fn breakpoints(fragments: &[Piece]) -> Vec<f64> {
    let mut raw: Vec<f64> = fragments.iter().flat_map(|f| [f.lo, f.hi]).collect();
    raw.push(0.0);
    raw.push(1.0);
    raw.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for x in raw {
        match out.last_mut() {
            Some(last) if x - *last < SNAP => {
                if x == 1.0 {
                    *last = 1.0;
                }
            }
            _ => out.push(x),
        }
    }
    out
}

fn snap_index(points: &[f64], x: f64) -> usize {
    let i = points.partition_point(|&p| p < x);
    let candidates = [i.saturating_sub(1), i.min(points.len() - 1)];
    candidates.into_iter().min_by(|&a, &b| (points[a] - x).abs().total_cmp(&(points[b] - x).abs())).unwrap()
}

/// Resolves overlapping fragments on `[0, 1]` into disjoint pieces.
fn stack(fragments: Vec<Piece>) -> Vec<Piece> {
    let points = breakpoints(&fragments);
    let cells = points.len() - 1;
    let mut per_cell: Vec<Vec<Piece>> = vec![Vec::new(); cells];
    for frag in &fragments {
        let i0 = snap_index(&points, frag.lo);
        let i1 = snap_index(&points, frag.hi);
        if i1 <= i0 {
            // Sliver narrower than SNAP: keep its mass in the nearest cell.
            let cell = i0.min(cells - 1);
            let (lo, hi) = (points[cell], points[cell + 1]);
            per_cell[cell].push(Piece { lo, hi, shape: PieceShape::Constant { level: 1.0 }, weight: frag.weight });
            continue;
        }
        for cell in i0..i1 {
            let a = if cell == i0 { frag.lo } else { points[cell] };
            let b = if cell + 1 == i1 { frag.hi } else { points[cell + 1] };
            let mut parts = frag.restrict(a, b);
            if let Some(first) = parts.first_mut() {
                first.lo = points[cell];
            }
            if let Some(last) = parts.last_mut() {
                last.hi = points[cell + 1];
            }
            per_cell[cell].extend(parts.into_iter().filter(|p| p.lo < p.hi));
        }
    }

    let mut out: Vec<Piece> = Vec::new();
    for (cell, parts) in per_cell.into_iter().enumerate() {
        let (lo, hi) = (points[cell], points[cell + 1]);
        for piece in combine(lo, hi, parts) {
            if piece.weight <= 0.0 {
                continue;
            }
            push_merging(&mut out, piece);
        }
    }
    out
}

fn tiles_cell(parts: &[Piece], lo: f64, hi: f64) -> bool {
    parts.first().is_some_and(|p| p.lo == lo)
        && parts.last().is_some_and(|p| p.hi == hi)
        && parts.windows(2).all(|w| w[0].hi == w[1].lo)
}

/// Sums the fragments covering one cell `[lo, hi)`.
fn combine(lo: f64, hi: f64, parts: Vec<Piece>) -> Vec<Piece> {
    match parts.len() {
        0 => return Vec::new(),
        1 => return parts,
        _ => {}
    }
    // A single fragment split at tabulation knots tiles the cell already.
    if tiles_cell(&parts, lo, hi) {
        return parts;
    }
    let weight = compensated_sum(parts.iter().map(|p| p.weight));
    let width = hi - lo;
    let full_width = |p: &Piece| p.lo == lo && p.hi == hi;

    if parts.iter().all(|p| matches!(p.shape, PieceShape::Constant { .. }) && full_width(p)) {
        return vec![Piece { lo, hi, shape: PieceShape::Constant { level: 1.0 }, weight }];
    }
    if parts.iter().all(|p| p.shape.is_affine() && full_width(p)) {
        let left: f64 = parts.iter().map(|p| p.weight / width * p.shape.pdf(0.0)).sum();
        let right: f64 = parts.iter().map(|p| p.weight / width * p.shape.pdf(1.0)).sum();
        return vec![Piece { lo, hi, shape: PieceShape::Linear { left, right }, weight }];
    }

    let n = ((width * OVERLAP_GRID as f64).ceil() as usize + 1).max(2);
    let ordinates: Vec<f64> = (0..n)
        .map(|i| {
            let x = lo + width * i as f64 / (n - 1) as f64;
            parts.iter().filter(|p| p.lo <= x && x <= p.hi).map(|p| p.value_at(x)).sum()
        })
        .collect();
    let shape = if ordinates.iter().any(|&o| o > 0.0) {
        PieceShape::Tabulated { ordinates }
    } else {
        PieceShape::Constant { level: 1.0 }
    };
    vec![Piece { lo, hi, shape, weight }]
}

/// Appends `piece`, fusing it with a preceding constant of the same height.
fn push_merging(out: &mut Vec<Piece>, piece: Piece) {
    if let Some(prev) = out.last_mut() {
        if let (PieceShape::Constant { .. }, PieceShape::Constant { .. }) = (&prev.shape, &piece.shape) {
            let h0 = prev.weight / prev.width();
            let h1 = piece.weight / piece.width();
            if prev.hi == piece.lo && (h0 - h1).abs() <= 1e-12 * h0.max(h1) {
                prev.hi = piece.hi;
                prev.weight += piece.weight;
                prev.shape = PieceShape::Constant { level: 1.0 };
                return;
            }
        }
    }
    out.push(piece);
}
