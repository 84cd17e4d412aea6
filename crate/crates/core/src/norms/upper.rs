//! Upper bounds for ‖A‖_{B^r} from decompositions into difference cells.
//!
//! A cell of order j is `Δ_{v_1}⋯Δ_{v_j}(p; α)`, the alternating sum of α over
//! the 2^j corners `p + Σ_{i∈S} v_i`. For any ω, j applications of the mean
//! value theorem give `|ω(cell)| ≤ ‖ω‖_{C^j} · mass(α) · Π‖v_i‖`, so any
//! decomposition of A into cells of order ≤ r certifies
//! `‖A‖_{B^r} ≤ Σ_cells mass(α) Π‖v_i‖`.
//!
//! The search is greedy: within each class of parallel k-vectors, order-(j-1)
//! cells with equal step lists and opposite weights are paired, nearest first,
//! into order-j cells whenever their base points are closer than 2.

use std::cmp::Ordering;
use crate::chains::{cmp_points, PointedChain};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::exterior::KVector;

/// Candidate partners kept per item and round.
const NEIGHBOURS: usize = 8;
const MAX_ROUNDS: usize = 16;
/// Two k-vectors share a class when their unit directions agree to this tolerance.
const PARALLEL_TOL: f64 = 1e-12;
/// Step lists are treated as equal when they agree to this relative tolerance;
/// corners recomputed along different paths differ by rounding.
const STEP_TOL: f64 = 1e-12;

/// `Δ_{steps}(base; vector)`, with the 2^j corners stored exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceCell {
    pub base: Vec<f64>,
    pub vector: KVector,
    pub steps: Vec<Vec<f64>>,
    /// `corners[S]` is the point for the step subset with bitmask S.
    pub corners: Vec<Vec<f64>>,
}

impl DifferenceCell {
    pub fn order(&self) -> usize {
        self.steps.len()
    }

    /// mass(α) · Π ‖v_i‖.
    pub fn weight(&self) -> f64 {
        let steps: f64 = self.steps.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).product();
        self.vector.mass().value * steps
    }

    /// Signed point terms (corner, ±α).
    pub fn expand(&self) -> Vec<(Vec<f64>, KVector)> {
        let j = self.order();
        self.corners
            .iter()
            .enumerate()
            .map(|(mask, p)| {
                let sign = if (j - (mask as u32).count_ones() as usize).is_multiple_of(2) { 1.0 } else { -1.0 };
                (p.clone(), self.vector.scale(sign))
            })
            .collect()
    }
}

/// Sums the expansions of a cell list into a pointed chain.
pub fn expand_cells(n: usize, k: usize, cells: &[DifferenceCell]) -> Result<PointedChain> {
    let mut out = PointedChain::new(n, k)?;
    for cell in cells {
        for (p, a) in cell.expand() {
            out.push(&p, a)?;
        }
    }
    Ok(out)
}

/// Σ weight over a cell list, summed pairwise.
pub fn cells_weight(cells: &[DifferenceCell]) -> f64 {
    let w: Vec<f64> = cells.iter().map(DifferenceCell::weight).collect();
    exec::pairwise_sum(&w)
}

#[derive(Clone, Debug)]
pub struct UpperBound {
    pub r: usize,
    pub value: f64,
    pub cells: Vec<DifferenceCell>,
}

#[derive(Clone, Debug)]
struct Item {
    corners: Vec<Vec<f64>>,
    steps: Vec<Vec<f64>>,
    weight: f64,
    class: usize,
    /// index of the source term while an order-0 item is untouched
    source: Option<usize>,
}

impl Item {
    fn base(&self) -> &[f64] {
        &self.corners[0]
    }
}

struct Class {
    direction: KVector,
}

fn same_steps(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    a.len() == b.len()
        && a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).abs() <= STEP_TOL * (1.0 + x.abs().max(y.abs())))
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn is_canonical(v: &[f64]) -> bool {
    v.iter().find(|x| **x != 0.0).is_none_or(|x| *x > 0.0)
}

/// Reorders steps lexicographically, permuting corner bitmasks to match.
fn sort_steps(steps: Vec<Vec<f64>>, corners: Vec<Vec<f64>>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let j = steps.len();
    let mut order: Vec<usize> = (0..j).collect();
    order.sort_by(|&a, &b| cmp_points(&steps[a], &steps[b]));
    let sorted: Vec<Vec<f64>> = order.iter().map(|&i| steps[i].clone()).collect();
    let mut new_corners = vec![Vec::new(); corners.len()];
    for (old_mask, c) in corners.into_iter().enumerate() {
        let mut new_mask = 0usize;
        for (new_pos, &old_pos) in order.iter().enumerate() {
            if old_mask & (1 << old_pos) != 0 {
                new_mask |= 1 << new_pos;
            }
        }
        new_corners[new_mask] = c;
    }
    (sorted, new_corners)
}

/// Δ_V(p; g) − Δ_V(q; g) as one order-(j+1) item with canonically oriented new step.
fn combine(p: &Item, q: &Item, g: f64) -> Item {
    let u: Vec<f64> = p.base().iter().zip(q.base()).map(|(a, b)| a - b).collect();
    // Δ_u(q; g) = Δ_{-u}(p; -g)
    let (low, high, weight, step) = if is_canonical(&u) {
        (q, p, g, u)
    } else {
        (p, q, -g, u.iter().map(|x| -x).collect())
    };
    let j = p.steps.len();
    let mut corners = low.corners.clone();
    corners.extend(high.corners.iter().cloned());
    debug_assert_eq!(corners.len(), 1 << (j + 1));
    let mut steps = p.steps.clone();
    steps.push(step);
    let (steps, corners) = sort_steps(steps, corners);
    Item { corners, steps, weight, class: p.class, source: None }
}

fn pair_order(items: &[Item], a: &(f64, usize, usize), b: &(f64, usize, usize)) -> Ordering {
    a.0.total_cmp(&b.0)
        .then_with(|| cmp_points(items[a.1].base(), items[b.1].base()))
        .then_with(|| cmp_points(items[a.2].base(), items[b.2].base()))
}

/// Greedily pairs opposite-signed items of one group. Returns the new
/// higher-order items; weights of `items` are reduced in place.
fn match_group(items: &mut [Item], exec: Exec) -> Vec<Item> {
    let mut created = Vec::new();
    for _ in 0..MAX_ROUNDS {
        let live: Vec<usize> = (0..items.len()).filter(|&i| items[i].weight != 0.0).collect();
        if live.len() < 2 {
            break;
        }
        let snapshot: &[Item] = items;
        let neighbour_lists = exec::map_slice(exec, &live, |&i| {
            let mut near: Vec<(f64, usize)> = live
                .iter()
                .filter(|&&j| j != i && snapshot[i].weight * snapshot[j].weight < 0.0)
                .map(|&j| (distance(snapshot[i].base(), snapshot[j].base()), j))
                .filter(|(d, _)| *d < 2.0)
                .collect();
            near.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| cmp_points(snapshot[a.1].base(), snapshot[b.1].base())));
            near.truncate(NEIGHBOURS);
            near.into_iter().map(|(d, j)| if i < j { (d, i, j) } else { (d, j, i) }).collect::<Vec<_>>()
        });
        let mut candidates: Vec<(f64, usize, usize)> = neighbour_lists.into_iter().flatten().collect();
        candidates.sort_by(|a, b| pair_order(items, a, b));
        candidates.dedup_by(|a, b| a.1 == b.1 && a.2 == b.2);

        let mut matched = 0;
        for (_, i, j) in candidates {
            let (a, b) = (items[i].weight, items[j].weight);
            if a * b >= 0.0 {
                continue;
            }
            let amount = a.abs().min(b.abs());
            let g = amount.copysign(a);
            created.push(combine(&items[i], &items[j], g));
            if a.abs() <= b.abs() {
                items[i].weight = 0.0;
                items[j].weight = if a.abs() == b.abs() { 0.0 } else { b + g };
            } else {
                items[j].weight = 0.0;
                items[i].weight = a - g;
            }
            items[i].source = None;
            items[j].source = None;
            matched += 1;
        }
        if matched == 0 {
            break;
        }
    }
    created
}

fn to_cell(item: &Item, classes: &[Class], source: &PointedChain) -> DifferenceCell {
    let vector = match item.source {
        Some(s) => source.terms()[s].vector.clone(),
        None => classes[item.class].direction.scale(item.weight),
    };
    DifferenceCell { base: item.base().to_vec(), vector, steps: item.steps.clone(), corners: item.corners.clone() }
}

fn classify(a: &PointedChain) -> (Vec<Class>, Vec<Item>) {
    let mut classes: Vec<Class> = Vec::new();
    let mut items = Vec::with_capacity(a.len());
    for (idx, term) in a.terms().iter().enumerate() {
        let len = term.vector.euclidean_norm();
        let mut d = term.vector.scale(1.0 / len);
        if !is_canonical(d.coeffs()) {
            d = d.scale(-1.0);
        }
        let found = classes.iter().position(|c| {
            c.direction.coeffs().iter().zip(d.coeffs()).all(|(x, y)| (x - y).abs() <= PARALLEL_TOL)
        });
        let class = found.unwrap_or_else(|| {
            classes.push(Class { direction: d.clone() });
            classes.len() - 1
        });
        let weight = term.vector.dot(&classes[class].direction);
        items.push(Item { corners: vec![term.point.clone()], steps: Vec::new(), weight, class, source: Some(idx) });
    }
    (classes, items)
}

/// Upper bounds for r = 0..=r_max in one pass; entry r uses cells of order ≤ r.
///
/// The sequence is non-increasing: every greedy match strictly lowers the
/// total weight, and a level that would not improve keeps the previous cells.
pub fn upper_bounds(a: &PointedChain, r_max: usize, exec: Exec) -> Result<Vec<UpperBound>> {
    let (classes, items) = classify(a);
    let mut settled: Vec<DifferenceCell> = Vec::new();
    let mut frontier = items;
    let cells_now = |settled: &[DifferenceCell], frontier: &[Item]| -> Vec<DifferenceCell> {
        let mut cells = settled.to_vec();
        cells.extend(frontier.iter().filter(|it| it.weight != 0.0).map(|it| to_cell(it, &classes, a)));
        cells
    };
    let initial = cells_now(&settled, &frontier);
    let mut results = vec![UpperBound { r: 0, value: cells_weight(&initial), cells: initial }];

    for order in 1..=r_max {
        let mut groups: Vec<Vec<Item>> = Vec::new();
        for item in frontier.drain(..) {
            let found = groups
                .iter_mut()
                .find(|g| g[0].class == item.class && same_steps(&g[0].steps, &item.steps));
            match found {
                Some(g) => g.push(item),
                None => groups.push(vec![item]),
            }
        }
        let mut next = Vec::new();
        for mut members in groups {
            let created = match_group(&mut members, exec);
            settled.extend(members.iter().filter(|it| it.weight != 0.0).map(|it| to_cell(it, &classes, a)));
            next.extend(created);
        }
        frontier = next;
        let cells = cells_now(&settled, &frontier);
        let value = cells_weight(&cells);
        let prev = results.last().expect("level 0 present");
        if value <= prev.value {
            results.push(UpperBound { r: order, value, cells });
        } else {
            results.push(UpperBound { r: order, value: prev.value, cells: prev.cells.clone() });
        }
    }
    Ok(results)
}

/// Certified upper bound for ‖A‖_{B^r}.
pub fn norm_upper(a: &PointedChain, r: usize) -> Result<UpperBound> {
    norm_upper_with(a, r, Exec::default())
}

pub fn norm_upper_with(a: &PointedChain, r: usize, exec: Exec) -> Result<UpperBound> {
    upper_bounds(a, r, exec)?.pop().ok_or_else(|| Error::InvalidArgument("no levels computed".into()))
}

/// Largest coefficient discrepancy between A and the expansion of `cells`,
/// relative to `1 + total mass of A`.
pub fn expansion_residual(a: &PointedChain, cells: &[DifferenceCell]) -> Result<f64> {
    let expanded = expand_cells(a.dim(), a.grade(), cells)?;
    let diff = a.sub(&expanded)?;
    let worst = diff.terms().iter().map(|t| t.vector.euclidean_norm()).fold(0.0, f64::max);
    Ok(worst / (1.0 + a.total_mass()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_chain(terms: &[(f64, f64)]) -> PointedChain {
        PointedChain::from_terms(1, 0, terms.iter().map(|&(p, c)| (vec![p], KVector::scalar(1, c)))).unwrap()
    }

    #[test]
    fn single_term_is_trivial() {
        let a = PointedChain::point(&[0.0], KVector::basis_element(1, &[0]).unwrap()).unwrap();
        for r in 0..4 {
            let ub = norm_upper(&a, r).unwrap();
            assert_eq!(ub.value, 1.0);
            assert_eq!(ub.cells.len(), 1);
        }
    }

    #[test]
    fn dipole_matches_one_cell() {
        let e1 = KVector::basis_element(1, &[0]).unwrap();
        let a = PointedChain::from_terms(1, 1, [(vec![0.1], e1.clone()), (vec![0.0], e1.scale(-1.0))]).unwrap();
        assert_eq!(norm_upper(&a, 0).unwrap().value, 2.0);
        let ub = norm_upper(&a, 1).unwrap();
        // certificate arithmetic: mass(e1) · ‖0.1 e1‖
        assert_eq!(ub.value, 1.0 * 0.1);
        assert_eq!(ub.cells.len(), 1);
        assert_eq!(ub.cells[0].order(), 1);
        assert_eq!(expansion_residual(&a, &ub.cells).unwrap(), 0.0);
    }

    #[test]
    fn second_difference_example() {
        let a = scalar_chain(&[(0.1, 1.0), (0.0, -2.0), (-0.1, 1.0)]);
        let ubs = upper_bounds(&a, 2, Exec::Sequential).unwrap();
        assert_eq!(ubs[0].value, 4.0);
        assert!((ubs[1].value - 0.2).abs() < 1e-15);
        // one Δ² cell: 1 · 0.1 · 0.1
        assert!((ubs[2].value - 0.1 * 0.1).abs() < 1e-15);
        assert_eq!(ubs[2].cells.len(), 1);
        assert_eq!(ubs[2].cells[0].order(), 2);
        assert_eq!(expansion_residual(&a, &ubs[2].cells).unwrap(), 0.0);
    }

    #[test]
    fn partial_weights_split() {
        // coarse term -1 at 0.5 against two children +0.5 at 0.25 and 0.75
        let a = scalar_chain(&[(0.25, 0.5), (0.5, -1.0), (0.75, 0.5)]);
        let ub = norm_upper(&a, 1).unwrap();
        assert!((ub.value - 2.0 * 0.5 * 0.25).abs() < 1e-15);
        assert!(expansion_residual(&a, &ub.cells).unwrap() < 1e-15);
    }

    #[test]
    fn far_apart_terms_are_not_matched() {
        let a = scalar_chain(&[(0.0, 1.0), (5.0, -1.0)]);
        assert_eq!(norm_upper(&a, 3).unwrap().value, 2.0);
    }

    #[test]
    fn sort_steps_permutes_corners() {
        let steps = vec![vec![2.0], vec![1.0]];
        let corners = vec![vec![0.0], vec![2.0], vec![1.0], vec![3.0]];
        let (s, c) = sort_steps(steps, corners);
        assert_eq!(s, vec![vec![1.0], vec![2.0]]);
        assert_eq!(c, vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]]);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let a = scalar_chain(&[(0.0, 1.0), (0.3, -0.5), (0.31, -0.5), (1.0, 2.0), (1.2, -2.0), (1.25, 0.1)]);
        let s = upper_bounds(&a, 3, Exec::Sequential).unwrap();
        let p = upper_bounds(&a, 3, Exec::Parallel).unwrap();
        for (x, y) in s.iter().zip(&p) {
            assert_eq!(x.value.to_bits(), y.value.to_bits());
        }
    }
}
