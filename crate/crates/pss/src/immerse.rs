//! Surface reconstruction: integrates the moving-frame equations
//!
//! `dP = ω₁e₁ + ω₂e₂, de₁ = ω₁₂e₂ + ω₁₃e₃, de₂ = −ω₁₂e₁ + ω₂₃e₃,
//!  de₃ = −ω₁₃e₁ − ω₂₃e₂`  (with ω₁₂ = ω₃)
//!
//! over a solution field, builds a triangle mesh from the frame positions,
//! estimates discrete Gaussian curvature by angle defect with mixed Voronoi
//! areas, and exports OBJ plus a curvature CSV.

use crate::jet::{EvalError, JetExpr};
use crate::solve::{jet_point_at, numerical_jet, SolutionField, SolveError};
use crate::system::{ImmersionData, PssSystem};
use nalgebra::Vector3;
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

type V3 = Vector3<f64>;

#[derive(Debug, Error)]
pub enum ImmerseError {
    #[error("admissible region is empty (mask_eps {mask_eps} exceeds every |z_x|)")]
    EmptyRegion { mask_eps: f64 },
    #[error("admissible region is disconnected: component sizes {sizes:?}")]
    Disconnected { sizes: Vec<usize> },
    #[error("frame drift {drift:e} exceeded the hard limit {limit:e} at node ({ix}, {it})")]
    DriftExceeded {
        drift: f64,
        limit: f64,
        ix: usize,
        it: usize,
    },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("form coefficient evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Which leg is integrated first when reaching a node from the anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationOrder {
    XThenT,
    TThenX,
}

#[derive(Debug, Clone)]
pub struct ImmerseOptions {
    /// Gram–Schmidt renormalization interval, in integration steps.
    pub renorm_every: usize,
    /// Hard abort threshold on pre-normalization orthonormality drift.
    pub drift_limit: f64,
    pub order: IntegrationOrder,
}

impl Default for ImmerseOptions {
    fn default() -> Self {
        ImmerseOptions {
            renorm_every: 16,
            drift_limit: 1e-3,
            order: IntegrationOrder::XThenT,
        }
    }
}

/// Default mask: a tenth of the field's largest |z_x|.
pub fn default_mask_eps(field: &SolutionField) -> f64 {
    let mut max_zx: f64 = 0.0;
    for it in 1..field.nt().saturating_sub(1) {
        for ix in interior_x(field) {
            if let Ok(zx) = numerical_jet(field, 1, 0, ix, it) {
                max_zx = max_zx.max(zx.abs());
            }
        }
    }
    0.1 * max_zx
}

fn interior_x(field: &SolutionField) -> std::ops::Range<usize> {
    if field.periodic() {
        0..field.nx()
    } else {
        1..field.nx().saturating_sub(1)
    }
}

/// Position and adapted frame at one grid node.
#[derive(Debug, Clone)]
pub struct FrameNode {
    pub ix: usize,
    pub it: usize,
    pub position: V3,
    pub e1: V3,
    pub e2: V3,
    pub e3: V3,
    /// |z_x| at the node, kept for masking.
    pub zx_abs: f64,
}

/// The integrated frame field over the admissible region.
#[derive(Debug, Clone)]
pub struct FrameField {
    pub nodes: Vec<FrameNode>,
    /// (ix, it) → index into `nodes`
    pub index: BTreeMap<(usize, usize), usize>,
    /// Largest orthonormality defect seen before any renormalization.
    pub max_drift: f64,
    /// Largest drift divided by the parameter length it accumulated over.
    pub max_drift_per_unit_length: f64,
}

impl FrameField {
    pub fn get(&self, ix: usize, it: usize) -> Option<&FrameNode> {
        self.index.get(&(ix, it)).map(|&i| &self.nodes[i])
    }
}

/// dx- or dt-coefficients of the five forms driving the frame ODEs, at one
/// node: (ω₁, ω₂, ω₃, ω₁₃, ω₂₃).
#[derive(Debug, Clone, Copy)]
struct Coeffs {
    w1: f64,
    w2: f64,
    w3: f64,
    w13: f64,
    w23: f64,
}

impl Coeffs {
    fn lerp(a: &Coeffs, b: &Coeffs, s: f64) -> Coeffs {
        Coeffs {
            w1: a.w1 + (b.w1 - a.w1) * s,
            w2: a.w2 + (b.w2 - a.w2) * s,
            w3: a.w3 + (b.w3 - a.w3) * s,
            w13: a.w13 + (b.w13 - a.w13) * s,
            w23: a.w23 + (b.w23 - a.w23) * s,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct State {
    p: V3,
    e1: V3,
    e2: V3,
    e3: V3,
}

impl State {
    fn seed() -> State {
        State {
            p: V3::zeros(),
            e1: V3::x(),
            e2: V3::y(),
            e3: V3::z(),
        }
    }

    fn derivative(&self, c: &Coeffs) -> State {
        State {
            p: c.w1 * self.e1 + c.w2 * self.e2,
            e1: c.w3 * self.e2 + c.w13 * self.e3,
            e2: -c.w3 * self.e1 + c.w23 * self.e3,
            e3: -c.w13 * self.e1 - c.w23 * self.e2,
        }
    }

    fn axpy(&self, h: f64, d: &State) -> State {
        State {
            p: self.p + h * d.p,
            e1: self.e1 + h * d.e1,
            e2: self.e2 + h * d.e2,
            e3: self.e3 + h * d.e3,
        }
    }

    /// Largest |eᵢ·eⱼ − δᵢⱼ|.
    fn orthonormality_defect(&self) -> f64 {
        let e = [self.e1, self.e2, self.e3];
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in i..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((e[i].dot(&e[j]) - target).abs());
            }
        }
        worst
    }

    fn renormalize(&mut self) {
        self.e1.normalize_mut();
        self.e2 -= self.e2.dot(&self.e1) * self.e1;
        self.e2.normalize_mut();
        self.e3 = self.e1.cross(&self.e2);
    }
}

fn rk4_step(state: &State, c0: &Coeffs, c1: &Coeffs, h: f64) -> State {
    let mid = Coeffs::lerp(c0, c1, 0.5);
    let k1 = state.derivative(c0);
    let k2 = state.axpy(h / 2.0, &k1).derivative(&mid);
    let k3 = state.axpy(h / 2.0, &k2).derivative(&mid);
    let k4 = state.axpy(h, &k3).derivative(c1);
    State {
        p: state.p + h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p),
        e1: state.e1 + h / 6.0 * (k1.e1 + 2.0 * k2.e1 + 2.0 * k3.e1 + k4.e1),
        e2: state.e2 + h / 6.0 * (k1.e2 + 2.0 * k2.e2 + 2.0 * k3.e2 + k4.e2),
        e3: state.e3 + h / 6.0 * (k1.e3 + 2.0 * k2.e3 + 2.0 * k3.e3 + k4.e3),
    }
}

struct Region {
    /// admissible node → (x-coefficients, t-coefficients, |z_x|)
    coeffs: BTreeMap<(usize, usize), (Coeffs, Coeffs, f64)>,
}

impl Region {
    fn build(
        sys: &PssSystem,
        imm: &ImmersionData,
        field: &SolutionField,
        mask_eps: f64,
    ) -> Result<Region, ImmerseError> {
        let exprs: [(&JetExpr, &JetExpr); 5] = [
            (&sys.omega1.dx, &sys.omega1.dt),
            (&sys.omega2.dx, &sys.omega2.dt),
            (&sys.omega3.dx, &sys.omega3.dt),
            (&imm.omega13.dx, &imm.omega13.dt),
            (&imm.omega23.dx, &imm.omega23.dt),
        ];
        let mut coeffs = BTreeMap::new();
        for it in 1..field.nt().saturating_sub(1) {
            for ix in interior_x(field) {
                let zx = numerical_jet(field, 1, 0, ix, it)?;
                if zx.abs() < mask_eps {
                    continue;
                }
                let point = jet_point_at(field, sys, ix, it)?;
                let mut evaluated = [[0.0f64; 2]; 5];
                for (k, (dx, dt)) in exprs.iter().enumerate() {
                    evaluated[k][0] = dx.evaluate(&point)?;
                    evaluated[k][1] = dt.evaluate(&point)?;
                }
                let pick = |col: usize| Coeffs {
                    w1: evaluated[0][col],
                    w2: evaluated[1][col],
                    w3: evaluated[2][col],
                    w13: evaluated[3][col],
                    w23: evaluated[4][col],
                };
                coeffs.insert((ix, it), (pick(0), pick(1), zx.abs()));
            }
        }
        Ok(Region { coeffs })
    }

    fn contains(&self, key: &(usize, usize)) -> bool {
        self.coeffs.contains_key(key)
    }

    /// Connected component sizes under 4-neighbor adjacency.
    fn component_sizes(&self) -> Vec<usize> {
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut sizes = Vec::new();
        for start in self.coeffs.keys() {
            if seen.contains(start) {
                continue;
            }
            let mut stack = vec![*start];
            let mut size = 0usize;
            seen.insert(*start);
            while let Some((ix, it)) = stack.pop() {
                size += 1;
                let mut push = |key: (usize, usize)| {
                    if self.contains(&key) && seen.insert(key) {
                        stack.push(key);
                    }
                };
                push((ix + 1, it));
                push((ix, it + 1));
                if ix > 0 {
                    push((ix - 1, it));
                }
                if it > 0 {
                    push((ix, it - 1));
                }
            }
            sizes.push(size);
        }
        sizes
    }

    fn anchor(&self) -> (usize, usize) {
        let mut best: Option<((usize, usize), f64)> = None;
        for (key, (_, _, zx)) in &self.coeffs {
            let better = match best {
                None => true,
                Some((_, best_zx)) => *zx > best_zx,
            };
            if better {
                best = Some((*key, *zx));
            }
        }
        best.expect("region checked nonempty").0
    }
}

struct Walker<'a> {
    region: &'a Region,
    h_x: f64,
    h_t: f64,
    renorm_every: usize,
    drift_limit: f64,
    max_drift: f64,
    max_drift_rate: f64,
    states: BTreeMap<(usize, usize), State>,
}

#[derive(Clone, Copy, PartialEq)]
enum Axis {
    X,
    T,
}

impl<'a> Walker<'a> {
    /// Marches from `start` along `axis` in direction `dir`, storing every
    /// node state, until the region ends.
    fn walk(&mut self, start: (usize, usize), axis: Axis, dir: isize) -> Result<(), ImmerseError> {
        let mut state = *self
            .states
            .get(&start)
            .expect("walk starts from a stored state");
        let mut key = start;
        let mut steps_since_renorm = 0usize;
        let h = match axis {
            Axis::X => self.h_x,
            Axis::T => self.h_t,
        } * dir as f64;
        loop {
            let next = match axis {
                Axis::X => (key.0 as isize + dir, key.1 as isize),
                Axis::T => (key.0 as isize, key.1 as isize + dir),
            };
            if next.0 < 0 || next.1 < 0 {
                return self.finish_walk(&mut state, key, steps_since_renorm, h.abs());
            }
            let next = (next.0 as usize, next.1 as usize);
            if !self.region.contains(&next) {
                return self.finish_walk(&mut state, key, steps_since_renorm, h.abs());
            }
            let (cx0, ct0, _) = &self.region.coeffs[&key];
            let (cx1, ct1, _) = &self.region.coeffs[&next];
            let (c0, c1) = match axis {
                Axis::X => (cx0, cx1),
                Axis::T => (ct0, ct1),
            };
            state = rk4_step(&state, c0, c1, h);
            steps_since_renorm += 1;
            key = next;
            if steps_since_renorm >= self.renorm_every {
                self.renormalize(&mut state, key, steps_since_renorm, h.abs())?;
                steps_since_renorm = 0;
            }
            self.states.entry(key).or_insert(state);
        }
    }

    fn finish_walk(
        &mut self,
        state: &mut State,
        key: (usize, usize),
        steps: usize,
        h: f64,
    ) -> Result<(), ImmerseError> {
        if steps > 0 {
            self.renormalize(state, key, steps, h)?;
        }
        Ok(())
    }

    fn renormalize(
        &mut self,
        state: &mut State,
        key: (usize, usize),
        steps: usize,
        h: f64,
    ) -> Result<(), ImmerseError> {
        let drift = state.orthonormality_defect();
        self.max_drift = self.max_drift.max(drift);
        let length = steps as f64 * h;
        if length > 0.0 {
            self.max_drift_rate = self.max_drift_rate.max(drift / length);
        }
        if drift > self.drift_limit {
            return Err(ImmerseError::DriftExceeded {
                drift,
                limit: self.drift_limit,
                ix: key.0,
                it: key.1,
            });
        }
        state.renormalize();
        Ok(())
    }
}

/// Integrates position and frame over the masked field.
///
/// The admissible region is the set of interior nodes with |z_x| ≥ mask_eps;
/// it must be connected. The anchor (seeded with P = 0 and the standard
/// basis) is the admissible node with the largest |z_x|. With the default
/// x-then-t order, the anchor's grid row is integrated first and every
/// column is then walked away from that row.
pub fn integrate_frame(
    sys: &PssSystem,
    imm: &ImmersionData,
    field: &SolutionField,
    mask_eps: f64,
    options: &ImmerseOptions,
) -> Result<FrameField, ImmerseError> {
    let region = Region::build(sys, imm, field, mask_eps)?;
    if region.coeffs.is_empty() {
        return Err(ImmerseError::EmptyRegion { mask_eps });
    }
    let sizes = region.component_sizes();
    if sizes.len() > 1 {
        return Err(ImmerseError::Disconnected { sizes });
    }
    let anchor = region.anchor();
    let mut walker = Walker {
        region: &region,
        h_x: field.dx(),
        h_t: field.dt_stored(),
        renorm_every: options.renorm_every.max(1),
        drift_limit: options.drift_limit,
        max_drift: 0.0,
        max_drift_rate: 0.0,
        states: BTreeMap::new(),
    };
    walker.states.insert(anchor, State::seed());

    let (first, second) = match options.order {
        IntegrationOrder::XThenT => (Axis::X, Axis::T),
        IntegrationOrder::TThenX => (Axis::T, Axis::X),
    };
    walker.walk(anchor, first, 1)?;
    walker.walk(anchor, first, -1)?;
    let line: Vec<(usize, usize)> = walker.states.keys().copied().collect();
    for key in line {
        walker.walk(key, second, 1)?;
        walker.walk(key, second, -1)?;
    }

    let mut nodes = Vec::with_capacity(walker.states.len());
    let mut index = BTreeMap::new();
    for (key, state) in &walker.states {
        let zx_abs = region.coeffs[key].2;
        index.insert(*key, nodes.len());
        nodes.push(FrameNode {
            ix: key.0,
            it: key.1,
            position: state.p,
            e1: state.e1,
            e2: state.e2,
            e3: state.e3,
            zx_abs,
        });
    }
    Ok(FrameField {
        nodes,
        index,
        max_drift: walker.max_drift,
        max_drift_per_unit_length: walker.max_drift_rate,
    })
}

/// Largest position gap between the two integration orders over their common
/// nodes. This is the numerical shadow of the Codazzi identities: it shrinks
/// at O(h²) exactly because the mixed exterior derivatives match.
pub fn path_independence_gap(
    sys: &PssSystem,
    imm: &ImmersionData,
    field: &SolutionField,
    mask_eps: f64,
) -> Result<f64, ImmerseError> {
    let a = integrate_frame(
        sys,
        imm,
        field,
        mask_eps,
        &ImmerseOptions {
            order: IntegrationOrder::XThenT,
            ..ImmerseOptions::default()
        },
    )?;
    let b = integrate_frame(
        sys,
        imm,
        field,
        mask_eps,
        &ImmerseOptions {
            order: IntegrationOrder::TThenX,
            ..ImmerseOptions::default()
        },
    )?;
    let mut gap: f64 = 0.0;
    for (key, &ia) in &a.index {
        if let Some(&ib) = b.index.get(key) {
            gap = gap.max((a.nodes[ia].position - b.nodes[ib].position).norm());
        }
    }
    Ok(gap)
}

/// Comparison of finite differences of the integrated frame against the
/// forms that drove it.
#[derive(Debug, Clone)]
pub struct FormErrors {
    /// max |ΔP/Δ − (ω₁e₁ + ω₂e₂)| over the common scale (both directions)
    pub first_form_max_rel: f64,
    /// same for Δe₃ against −(ω₁₃e₁ + ω₂₃e₂)
    pub second_form_max_rel: f64,
    pub nodes_checked: usize,
}

/// Differentiates the integrated positions and normals by central
/// differences and compares with the form coefficients at each node.
pub fn induced_form_errors(
    frame: &FrameField,
    sys: &PssSystem,
    imm: &ImmersionData,
    field: &SolutionField,
) -> Result<FormErrors, ImmerseError> {
    let region = Region::build(sys, imm, field, 0.0)?;
    let hx = field.dx();
    let ht = field.dt_stored();
    let mut first_err: f64 = 0.0;
    let mut first_scale: f64 = 0.0;
    let mut second_err: f64 = 0.0;
    let mut second_scale: f64 = 0.0;
    let mut nodes_checked = 0usize;
    for node in &frame.nodes {
        let (ix, it) = (node.ix, node.it);
        let neighbors = [
            frame.get(ix + 1, it),
            ix.checked_sub(1).and_then(|i| frame.get(i, it)),
            frame.get(ix, it + 1),
            it.checked_sub(1).and_then(|j| frame.get(ix, j)),
        ];
        let [Some(xp), Some(xm), Some(tp), Some(tm)] = neighbors else {
            continue;
        };
        let Some((cx, ct, _)) = region.coeffs.get(&(ix, it)) else {
            continue;
        };
        nodes_checked += 1;

        let dp_dx = (xp.position - xm.position) / (2.0 * hx);
        let dp_dt = (tp.position - tm.position) / (2.0 * ht);
        let expect_x = cx.w1 * node.e1 + cx.w2 * node.e2;
        let expect_t = ct.w1 * node.e1 + ct.w2 * node.e2;
        first_err = first_err
            .max((dp_dx - expect_x).norm())
            .max((dp_dt - expect_t).norm());
        first_scale = first_scale.max(expect_x.norm()).max(expect_t.norm());

        let de3_dx = (xp.e3 - xm.e3) / (2.0 * hx);
        let de3_dt = (tp.e3 - tm.e3) / (2.0 * ht);
        let expect3_x = -(cx.w13 * node.e1 + cx.w23 * node.e2);
        let expect3_t = -(ct.w13 * node.e1 + ct.w23 * node.e2);
        second_err = second_err
            .max((de3_dx - expect3_x).norm())
            .max((de3_dt - expect3_t).norm());
        second_scale = second_scale.max(expect3_x.norm()).max(expect3_t.norm());
    }
    Ok(FormErrors {
        first_form_max_rel: if first_scale > 0.0 {
            first_err / first_scale
        } else {
            0.0
        },
        second_form_max_rel: if second_scale > 0.0 {
            second_err / second_scale
        } else {
            0.0
        },
        nodes_checked,
    })
}

// ---------------------------------------------------------------------------
// Meshing
// ---------------------------------------------------------------------------

/// Minimum triangle area kept in a mesh.
pub const DEGENERATE_AREA: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub vertices: Vec<V3>,
    pub triangles: Vec<[usize; 3]>,
    /// Discrete Gaussian curvature per vertex; `None` until computed or on
    /// boundary vertices.
    pub curvature: Vec<Option<f64>>,
    /// |z_x| mask flag per vertex (true = above the reporting threshold).
    pub mask: Vec<bool>,
}

impl SurfaceMesh {
    /// Builds a mesh from the frame field. Each grid quad with all four
    /// corners present becomes two triangles, split along its shorter
    /// diagonal; triangles under the degenerate-area floor are dropped.
    /// The mask records which vertices satisfy |z_x| ≥ `mask_threshold`.
    pub fn from_frame(frame: &FrameField, mask_threshold: f64) -> SurfaceMesh {
        let vertices: Vec<V3> = frame.nodes.iter().map(|n| n.position).collect();
        let mask: Vec<bool> = frame
            .nodes
            .iter()
            .map(|n| n.zx_abs >= mask_threshold)
            .collect();
        let mut triangles = Vec::new();
        let mut push = |tri: [usize; 3], verts: &[V3]| {
            let area = 0.5
                * (verts[tri[1]] - verts[tri[0]])
                    .cross(&(verts[tri[2]] - verts[tri[0]]))
                    .norm();
            if area >= DEGENERATE_AREA {
                triangles.push(tri);
            }
        };
        for (&(ix, it), &v00) in &frame.index {
            let (Some(&v10), Some(&v01), Some(&v11)) = (
                frame.index.get(&(ix + 1, it)),
                frame.index.get(&(ix, it + 1)),
                frame.index.get(&(ix + 1, it + 1)),
            ) else {
                continue;
            };
            let d1 = (vertices[v00] - vertices[v11]).norm();
            let d2 = (vertices[v10] - vertices[v01]).norm();
            if d1 <= d2 {
                push([v00, v10, v11], &vertices);
                push([v00, v11, v01], &vertices);
            } else {
                push([v00, v10, v01], &vertices);
                push([v10, v11, v01], &vertices);
            }
        }
        SurfaceMesh {
            curvature: vec![None; vertices.len()],
            mask,
            vertices,
            triangles,
        }
    }

    pub fn from_parts(vertices: Vec<V3>, triangles: Vec<[usize; 3]>) -> SurfaceMesh {
        let n = vertices.len();
        SurfaceMesh {
            vertices,
            triangles,
            curvature: vec![None; n],
            mask: vec![true; n],
        }
    }

    /// Computes and stores per-vertex curvature; returns the estimates.
    pub fn compute_curvature(&mut self) -> &[Option<f64>] {
        self.curvature = discrete_gauss_curvature(self);
        &self.curvature
    }
}

/// Angle-defect Gaussian curvature: `K(v) = (2π − Σ incident angles) /
/// A_mixed(v)` with Meyer's mixed Voronoi area. Boundary vertices (on an
/// edge with only one incident triangle) are flagged `None`.
pub fn discrete_gauss_curvature(mesh: &SurfaceMesh) -> Vec<Option<f64>> {
    let nv = mesh.vertices.len();
    let mut angle_sum = vec![0.0f64; nv];
    let mut mixed_area = vec![0.0f64; nv];
    let mut edge_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();

    let edge_key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    for tri in &mesh.triangles {
        for k in 0..3 {
            *edge_count
                .entry(edge_key(tri[k], tri[(k + 1) % 3]))
                .or_insert(0) += 1;
        }
        let p = [
            mesh.vertices[tri[0]],
            mesh.vertices[tri[1]],
            mesh.vertices[tri[2]],
        ];
        let mut angles = [0.0f64; 3];
        for k in 0..3 {
            let a = p[(k + 1) % 3] - p[k];
            let b = p[(k + 2) % 3] - p[k];
            angles[k] = a.cross(&b).norm().atan2(a.dot(&b));
        }
        let area = 0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm();
        let obtuse = mesh_obtuse_corner(&angles);
        for k in 0..3 {
            angle_sum[tri[k]] += angles[k];
            let part = match obtuse {
                None => {
                    let e_prev = (p[(k + 2) % 3] - p[k]).norm_squared();
                    let e_next = (p[(k + 1) % 3] - p[k]).norm_squared();
                    let cot_next = {
                        let a = angles[(k + 1) % 3];
                        a.cos() / a.sin()
                    };
                    let cot_prev = {
                        let a = angles[(k + 2) % 3];
                        a.cos() / a.sin()
                    };
                    // Voronoi area: edges opposite the far angles
                    (e_prev * cot_next + e_next * cot_prev) / 8.0
                }
                Some(j) if j == k => area / 2.0,
                Some(_) => area / 4.0,
            };
            mixed_area[tri[k]] += part;
        }
    }

    let mut boundary = vec![false; nv];
    for (&(a, b), &count) in &edge_count {
        if count == 1 {
            boundary[a] = true;
            boundary[b] = true;
        }
    }

    (0..nv)
        .map(|v| {
            if boundary[v] || mixed_area[v] <= 0.0 {
                None
            } else {
                Some((2.0 * std::f64::consts::PI - angle_sum[v]) / mixed_area[v])
            }
        })
        .collect()
}

fn mesh_obtuse_corner(angles: &[f64; 3]) -> Option<usize> {
    angles
        .iter()
        .position(|&a| a > std::f64::consts::FRAC_PI_2)
}

/// Unit icosphere mesh (icosahedron subdivided and projected). A calibration
/// surface with known curvature +1.
pub fn icosphere(subdivisions: u32) -> SurfaceMesh {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let raw = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ];
    let mut vertices: Vec<V3> = raw
        .iter()
        .map(|&(x, y, z)| V3::new(x, y, z).normalize())
        .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for tri in &triangles {
            let mut mids = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = if a < b { (a, b) } else { (b, a) };
                mids[k] = *midpoint.entry(key).or_insert_with(|| {
                    let m = ((vertices[a] + vertices[b]) / 2.0).normalize();
                    vertices.push(m);
                    vertices.len() - 1
                });
            }
            next.push([tri[0], mids[0], mids[2]]);
            next.push([tri[1], mids[1], mids[0]]);
            next.push([tri[2], mids[2], mids[1]]);
            next.push([mids[0], mids[1], mids[2]]);
        }
        triangles = next;
    }
    SurfaceMesh::from_parts(vertices, triangles)
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

/// Writes ASCII OBJ: `v x y z` lines then 1-based `f i j k` lines.
pub fn export_obj(mesh: &SurfaceMesh, path: &Path) -> Result<(), ImmerseError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for v in &mesh.vertices {
        writeln!(out, "v {} {} {}", v.x, v.y, v.z)?;
    }
    for t in &mesh.triangles {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}

/// Writes the per-vertex curvature attribute as CSV
/// (`vertex_index,K,mask_flag`; `K` empty for flagged boundary vertices).
pub fn export_curvature_csv(mesh: &SurfaceMesh, path: &Path) -> Result<(), ImmerseError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "vertex_index,K,mask_flag")?;
    for (i, k) in mesh.curvature.iter().enumerate() {
        let kstr = k.map(|v| v.to_string()).unwrap_or_default();
        writeln!(out, "{i},{kstr},{}", u8::from(mesh.mask[i]))?;
    }
    Ok(())
}

/// Re-imports an OBJ written by [`export_obj`].
pub fn import_obj(path: &Path) -> Result<SurfaceMesh, ImmerseError> {
    let text = std::fs::read_to_string(path)?;
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for line in text.lines() {
        let mut cells = line.split_whitespace();
        match cells.next() {
            Some("v") => {
                let coords: Vec<f64> = cells.map(|c| c.parse().unwrap_or(f64::NAN)).collect();
                vertices.push(V3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = cells.map(|c| c.parse().unwrap_or(1) - 1).collect();
                triangles.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    Ok(SurfaceMesh::from_parts(vertices, triangles))
}
