use std::collections::HashMap;

use super::{assemble, Cocycle, FiniteGroupoid, GroupoidError};
use crate::groups::FiniteGroup;

/// `G` acting on a groupoid by automorphisms: `perm[t][x] = t·x`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupoidAction {
    pub group: FiniteGroup,
    perm: Vec<Vec<usize>>,
}

impl GroupoidAction {
    /// Checks that every `x ↦ t·x` is a groupoid automorphism and that
    /// `s·(t·x) = (st)·x`.
    pub fn new(q: &FiniteGroupoid, group: FiniteGroup, perm: Vec<Vec<usize>>) -> Result<Self, GroupoidError> {
        let fail =
            |t: usize, detail: String| GroupoidError::NotAutomorphism { element: group.name(t).to_string(), detail };
        if perm.len() != group.order() {
            return Err(fail(group.identity(), format!("{} permutations for {} elements", perm.len(), group.order())));
        }
        let n = q.num_arrows();
        for t in group.elements() {
            let p = &perm[t];
            let mut hit = vec![false; n];
            if p.len() != n || p.iter().any(|&y| y >= n || std::mem::replace(&mut hit[y], true)) {
                return Err(fail(t, "not a bijection of the arrows".into()));
            }
            for x in q.arrows() {
                if q.is_unit(x) != q.is_unit(p[x]) {
                    return Err(fail(t, format!("moves `{}` across the unit space", q.name(x))));
                }
                if p[q.src(x)] != q.src(p[x]) || p[q.rng(x)] != q.rng(p[x]) || p[q.inv(x)] != q.inv(p[x]) {
                    return Err(fail(t, format!("does not commute with r, s or inverse at `{}`", q.name(x))));
                }
                for &y in q.with_range(q.src(x)) {
                    let xy = q.mul(x, y).expect("composable");
                    if q.mul(p[x], p[y]) != Some(p[xy]) {
                        return Err(fail(t, format!("breaks the product `{}·{}`", q.name(x), q.name(y))));
                    }
                }
            }
        }
        for s in group.elements() {
            for t in group.elements() {
                let st = group.mul(s, t);
                if let Some(x) = q.arrows().find(|&x| perm[s][perm[t][x]] != perm[st][x]) {
                    return Err(fail(st, format!("s·(t·x) ≠ (st)·x at `{}`", q.name(x))));
                }
            }
        }
        Ok(GroupoidAction { group, perm })
    }

    pub fn trivial(q: &FiniteGroupoid, group: FiniteGroup) -> Self {
        let perm = vec![q.arrows().collect(); group.order()];
        GroupoidAction { group, perm }
    }

    /// `t·x`.
    pub fn act(&self, t: usize, x: usize) -> usize {
        self.perm[t][x]
    }
}

/// `Q ×_c G` with `r(x,s) = (r(x), c(x)s)`, `s(x,s) = (s(x), s)` and
/// `(x, c(y)s)(y, s) = (xy, s)`, together with `t·(x,s) = (x, st⁻¹)`.
#[derive(Clone, Debug)]
pub struct SkewGroupoid {
    pub groupoid: FiniteGroupoid,
    pub base: FiniteGroupoid,
    pub cocycle: Cocycle,
    /// The translation action inducing `β_t(f)(x,s) = f(x, st)`.
    pub beta: GroupoidAction,
    cells: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl SkewGroupoid {
    pub fn group(&self) -> &FiniteGroup {
        &self.cocycle.group
    }

    pub fn arrow(&self, x: usize, s: usize) -> usize {
        self.index[&(x, s)]
    }

    pub fn split(&self, k: usize) -> (usize, usize) {
        self.cells[k]
    }
}

pub fn skew_product_groupoid(q: &FiniteGroupoid, c: &Cocycle) -> Result<SkewGroupoid, GroupoidError> {
    let g = &c.group;
    let all: Vec<(usize, usize)> = q.arrows().flat_map(|x| g.elements().map(move |s| (x, s))).collect();
    let (groupoid, cells) = assemble(
        all,
        |&(x, _)| q.is_unit(x),
        |&(x, s)| format!("({},{})", q.name(x), g.name(s)),
        |&(x, s)| (q.src(x), s),
        |&(x, s)| (q.rng(x), g.mul(c.get(x), s)),
        |&(x, s)| (q.inv(x), g.mul(c.get(x), s)),
        |&(x, _), &(y, b)| (q.mul(x, y).unwrap_or(usize::MAX), b),
    )?;
    let index: HashMap<(usize, usize), usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let perm: Vec<Vec<usize>> =
        g.elements().map(|t| cells.iter().map(|&(x, s)| index[&(x, g.mul(s, g.inv(t)))]).collect()).collect();
    let beta = GroupoidAction::new(&groupoid, g.clone(), perm)?;
    Ok(SkewGroupoid { groupoid, base: q.clone(), cocycle: c.clone(), beta, cells, index })
}

/// `R ⋊ G` with `(x,s)(y,t) = (x(s·y), st)` and `(x,s)⁻¹ = (s⁻¹·x⁻¹, s⁻¹)`.
#[derive(Clone, Debug)]
pub struct SemidirectProduct {
    pub groupoid: FiniteGroupoid,
    pub base: FiniteGroupoid,
    pub action: GroupoidAction,
    cells: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl SemidirectProduct {
    pub fn arrow(&self, x: usize, s: usize) -> usize {
        self.index[&(x, s)]
    }

    pub fn split(&self, k: usize) -> (usize, usize) {
        self.cells[k]
    }
}

pub fn semidirect_product(r: &FiniteGroupoid, action: &GroupoidAction) -> Result<SemidirectProduct, GroupoidError> {
    let g = &action.group;
    let e = g.identity();
    let all: Vec<(usize, usize)> = r.arrows().flat_map(|x| g.elements().map(move |s| (x, s))).collect();
    let (groupoid, cells) = assemble(
        all,
        |&(x, s)| r.is_unit(x) && s == e,
        |&(x, s)| format!("({},{})", r.name(x), g.name(s)),
        |&(x, s)| (action.act(g.inv(s), r.src(x)), e),
        |&(x, _)| (r.rng(x), e),
        |&(x, s)| (action.act(g.inv(s), r.inv(x)), g.inv(s)),
        |&(x, s), &(y, t)| (r.mul(x, action.act(s, y)).unwrap_or(usize::MAX), g.mul(s, t)),
    )?;
    let index = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    Ok(SemidirectProduct { groupoid, base: r.clone(), action: action.clone(), cells, index })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoids::convolution_algebra;
    use crate::matalg::{wedderburn_signature, Config, Signature};

    pub(crate) fn pair_z2() -> (FiniteGroupoid, Cocycle) {
        let q = FiniteGroupoid::pair(2).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let v = q.arrows().map(|x| if q.is_unit(x) { 0 } else { 1 }).collect();
        let c = Cocycle::new(&q, &z2, v).unwrap();
        (q, c)
    }

    #[test]
    fn skew_of_pair_is_two_pairs() {
        let (q, c) = pair_z2();
        let sk = skew_product_groupoid(&q, &c).unwrap();
        assert_eq!(sk.groupoid.num_units(), 4);
        assert_eq!(sk.groupoid.orbits().len(), 2);
        let cfg = Config::default();
        let a = convolution_algebra(&sk.groupoid, &cfg).unwrap();
        assert_eq!(wedderburn_signature(&a.span, &cfg).unwrap(), Signature(vec![2, 2]));
        // r(x,s) = (r(x), c(x)s)
        let x12 = q.index_of("x12").unwrap();
        let k = sk.arrow(x12, 0);
        assert_eq!(sk.split(sk.groupoid.rng(k)), (q.rng(x12), 1));
        assert_eq!(sk.split(sk.groupoid.src(k)), (q.src(x12), 0));
    }

    #[test]
    fn trivial_cocycle_gives_copies() {
        let q = FiniteGroupoid::pair(2).unwrap();
        let z3 = FiniteGroup::cyclic(3).unwrap();
        let sk = skew_product_groupoid(&q, &Cocycle::trivial(&q, &z3)).unwrap();
        assert_eq!(sk.groupoid.orbits().len(), 3);
        assert_eq!(sk.groupoid.num_arrows(), 12);
    }

    #[test]
    fn beta_shifts_second_coordinate() {
        let (q, c) = pair_z2();
        let sk = skew_product_groupoid(&q, &c).unwrap();
        for k in sk.groupoid.arrows() {
            let (x, s) = sk.split(k);
            assert_eq!(sk.split(sk.beta.act(1, k)), (x, (s + 1) % 2));
        }
    }

    #[test]
    fn swap_on_two_points() {
        let r = FiniteGroupoid::units_only(2).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let a = GroupoidAction::new(&r, z2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let sd = semidirect_product(&r, &a).unwrap();
        let cfg = Config::default();
        let alg = convolution_algebra(&sd.groupoid, &cfg).unwrap();
        assert_eq!(wedderburn_signature(&alg.span, &cfg).unwrap(), Signature(vec![2]));
    }

    #[test]
    fn semidirect_of_skew_has_16_arrows() {
        let (q, c) = pair_z2();
        let sk = skew_product_groupoid(&q, &c).unwrap();
        let sd = semidirect_product(&sk.groupoid, &sk.beta).unwrap();
        assert_eq!(sd.groupoid.num_arrows(), 16);
        assert_eq!(sd.groupoid.num_units(), 4);
    }

    #[test]
    fn trivial_group_semidirect_is_base() {
        let (q, _) = pair_z2();
        let a = GroupoidAction::trivial(&q, FiniteGroup::trivial());
        let sd = semidirect_product(&q, &a).unwrap();
        assert_eq!(sd.groupoid.num_arrows(), q.num_arrows());
        for x in q.arrows() {
            for y in q.arrows() {
                let lhs = sd.groupoid.mul(sd.arrow(x, 0), sd.arrow(y, 0)).map(|k| sd.split(k).0);
                assert_eq!(lhs, q.mul(x, y));
            }
        }
    }

    #[test]
    fn non_automorphism_rejected() {
        let q = FiniteGroupoid::pair(2).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        // swaps x12 with a unit
        let mut p = vec![0, 1, 2, 3];
        let x12 = q.index_of("x12").unwrap();
        p.swap(0, x12);
        let res = GroupoidAction::new(&q, z2, vec![vec![0, 1, 2, 3], p]);
        assert!(matches!(res, Err(GroupoidError::NotAutomorphism { .. })));
    }
}
