//! Splitting a rectangle against a triangle `{(x, y) : a(x) < b(y)}`.

use std::fmt;

use num_rational::BigRational;

use super::SimError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadrantKind {
    /// The whole rectangle lies on one side.
    Whole,
    /// Membership depends on `x` only; the larger row side is kept.
    Rows,
    /// Membership depends on `y` only; the larger column side is kept.
    Columns,
    /// First `⌈p/2⌉` rows by increasing `a` times first `⌈q/2⌉` columns by decreasing `b`.
    First,
    /// Last `⌈p/2⌉` rows times last `⌈q/2⌉` columns in the same orders.
    Fourth,
}

impl fmt::Display for QuadrantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QuadrantKind::Whole => "whole",
            QuadrantKind::Rows => "rows",
            QuadrantKind::Columns => "columns",
            QuadrantKind::First => "first",
            QuadrantKind::Fourth => "fourth",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quadrant {
    pub kind: QuadrantKind,
    /// `true` when `R′ ⊆ T`, `false` when `R′ ∩ T = ∅`.
    pub inside: bool,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
}

fn in_t(a: &[BigRational], b: &[BigRational], x: usize, y: usize) -> bool {
    a[x] < b[y]
}

fn side_of(a: &[BigRational], b: &[BigRational], xs: &[usize], ys: &[usize]) -> Option<bool> {
    let first = in_t(a, b, xs[0], ys[0]);
    xs.iter().all(|&x| ys.iter().all(|&y| in_t(a, b, x, y) == first)).then_some(first)
}

/// Picks `R′ ⊆ R = xs × ys` that lies inside or outside `T`, trying the whole
/// rectangle, a one-party split, then the first and fourth quadrants after
/// sorting rows by `a` ascending and columns by `b` descending (ties by
/// index). Containment or disjointness and `|R′| ≥ |R|/4` are re-checked
/// before returning.
pub fn quadrant_select(xs: &[usize], ys: &[usize], a: &[BigRational], b: &[BigRational]) -> Result<Quadrant, SimError> {
    if xs.is_empty() || ys.is_empty() {
        return Err(SimError::EmptyRectangle);
    }
    if xs.iter().any(|&x| x >= a.len()) || ys.iter().any(|&y| y >= b.len()) {
        return Err(SimError::Shape("rectangle outside the labeling domain".into()));
    }
    let choice = pick(xs, ys, a, b);
    let (p, q) = (xs.len(), ys.len());
    if choice.x.len() * choice.y.len() * 4 < p * q {
        return Err(SimError::Shape(format!("quadrant {} below a quarter of the rectangle", choice.kind)));
    }
    if side_of(a, b, &choice.x, &choice.y) != Some(choice.inside) {
        return Err(SimError::Shape(format!("quadrant {} straddles the triangle", choice.kind)));
    }
    Ok(choice)
}

fn pick(xs: &[usize], ys: &[usize], a: &[BigRational], b: &[BigRational]) -> Quadrant {
    if let Some(inside) = side_of(a, b, xs, ys) {
        return Quadrant { kind: QuadrantKind::Whole, inside, x: xs.to_vec(), y: ys.to_vec() };
    }
    let rows_only = xs.iter().all(|&x| side_of(a, b, &[x], ys).is_some());
    if rows_only {
        let (inn, out): (Vec<usize>, Vec<usize>) = xs.iter().partition(|&&x| in_t(a, b, x, ys[0]));
        let inside = inn.len() >= out.len();
        return Quadrant { kind: QuadrantKind::Rows, inside, x: if inside { inn } else { out }, y: ys.to_vec() };
    }
    let cols_only = ys.iter().all(|&y| side_of(a, b, xs, &[y]).is_some());
    if cols_only {
        let (inn, out): (Vec<usize>, Vec<usize>) = ys.iter().partition(|&&y| in_t(a, b, xs[0], y));
        let inside = inn.len() >= out.len();
        return Quadrant { kind: QuadrantKind::Columns, inside, x: xs.to_vec(), y: if inside { inn } else { out } };
    }
    let mut rows = xs.to_vec();
    rows.sort_by(|&u, &v| a[u].cmp(&a[v]).then(u.cmp(&v)));
    let mut cols = ys.to_vec();
    cols.sort_by(|&u, &v| b[v].cmp(&b[u]).then(u.cmp(&v)));
    let (hp, hq) = (rows.len().div_ceil(2), cols.len().div_ceil(2));
    let first = (rows[..hp].to_vec(), cols[..hq].to_vec());
    if let Some(inside) = side_of(a, b, &first.0, &first.1) {
        return Quadrant { kind: QuadrantKind::First, inside, x: first.0, y: first.1 };
    }
    let x = rows[rows.len() - hp..].to_vec();
    let y = cols[cols.len() - hq..].to_vec();
    let inside = side_of(a, b, &x, &y).unwrap_or(false);
    Quadrant { kind: QuadrantKind::Fourth, inside, x, y }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }

    #[test]
    fn whole_rectangle_sides() {
        let r = quadrant_select(&[0, 1], &[0, 1], &q(&[0, 0]), &q(&[1, 1])).unwrap();
        assert_eq!((r.kind, r.inside), (QuadrantKind::Whole, true));
        let r = quadrant_select(&[0, 1], &[0, 1], &q(&[2, 2]), &q(&[1, 1])).unwrap();
        assert_eq!((r.kind, r.inside), (QuadrantKind::Whole, false));
    }

    #[test]
    fn diagonal_two_by_two_keeps_a_quarter() {
        // T = {(x, y) : x < y} over ranks 1..2 on each side.
        let r = quadrant_select(&[0, 1], &[0, 1], &q(&[1, 2]), &q(&[1, 2])).unwrap();
        assert_eq!(r.x.len() * r.y.len(), 1);
        assert_eq!((r.kind, r.inside, r.x.clone(), r.y.clone()), (QuadrantKind::First, true, vec![0], vec![1]));
    }

    #[test]
    fn one_party_split_keeps_larger_side() {
        let r = quadrant_select(&[0, 1, 2], &[0, 1], &q(&[0, 1, 1]), &q(&[1, 1])).unwrap();
        assert_eq!((r.kind, r.inside, r.x.clone()), (QuadrantKind::Rows, false, vec![1, 2]));
        let r = quadrant_select(&[0, 1], &[0, 1], &q(&[0, 0]), &q(&[0, 1])).unwrap();
        assert_eq!((r.kind, r.inside, r.y.clone()), (QuadrantKind::Columns, true, vec![1]));
    }
}
