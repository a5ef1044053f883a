"""Direct-transcription assembly of the locomotion NLP.

Decision vector (all real-valued, contact schedule fixed):

    w = [ com | feet | loads ]

    com    5 coefficients x 2 axes per spline polynomial
    feet   per foot, per stance: x, y and, for multi-vertex feet, a yaw
           angle (point feet drop it; their CoP is rotation-invariant)
    loads  per time node, one load fraction per (foot, vertex)

Constraint rows, in order:

    initial     spline position/velocity at t=0 equals the given state
    continuity  position/velocity match at every interior junction
    dynamics    spline acceleration equals (g/h)(c - u) at the start,
                middle and end of every polynomial, which bounds the
                integration defect by O(duration^4)
    rom         foot-to-CoM offset inside the reach box at every load
                node time (plus the final time)
    load_sum    loads sum to one at every node
    terminal    spline state at T equals the goal (maskable)

Everything except the dynamics rows is linear in w, so those rows live in
one fixed sparse matrix. The dynamics rows add (g/h) * u(t) with
u = sum of load * world-vertex terms, bilinear in (loads, footholds) and
trigonometric in yaw; their Jacobian entries are recomputed into a fixed
sparsity pattern at each evaluation. Variable bounds carry the per-node
load box 0 <= lambda <= contact_flag, so a swinging foot is unloaded
exactly, not just within tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .feet import FootGeometry, FootPlan, FootTimeline
from .gait import ContactSchedule
from .lip import PendulumParams, PendulumState
from .loads import LoadProfile, entry_offsets, load_target
from .motion import Motion
from .spline import ComSpline



@dataclass
class BoundaryConditions:
    """Initial and goal CoM states; either part of the goal can be freed."""

    x0: PendulumState
    xT: PendulumState
    fix_terminal_position: bool = True
    fix_terminal_velocity: bool = True


@dataclass
class ConstraintBlock:
    name: str
    kind: str          # 'equality' or 'interval'
    rows: slice
    lower: np.ndarray
    upper: np.ndarray
    linear: bool


class DecisionLayout:
    """Index bookkeeping for the decision vector."""

    def __init__(self, n_polys: int, n_stances: Sequence[int],
                 has_alpha: Sequence[bool], n_nodes: int, n_entries: int):
        self.n_polys = n_polys
        self.n_stances = list(n_stances)
        self.has_alpha = list(has_alpha)
        self.n_nodes = n_nodes
        self.n_entries = n_entries

        self.com_offset = 0
        self.com_size = n_polys * 10
        self.feet_offset = self.com_size
        self.stance_stride = [3 if a else 2 for a in self.has_alpha]
        self.foot_base = []
        off = self.feet_offset
        for ns, stride in zip(self.n_stances, self.stance_stride):
            self.foot_base.append(off)
            off += ns * stride
        self.feet_size = off - self.feet_offset
        self.load_offset = off
        self.load_size = n_nodes * n_entries
        self.dim = off + self.load_size

    def com_index(self, k: int, i: int, axis: int) -> int:
        return self.com_offset + k * 10 + i * 2 + axis

    def stance_index(self, foot: int, j: int, component: int) -> int:
        # component 0: x, 1: y, 2: yaw (only for multi-vertex feet)
        if component == 2 and not self.has_alpha[foot]:
            raise IndexError(f"foot {foot} has no yaw variable")
        return self.foot_base[foot] + j * self.stance_stride[foot] + component

    def load_index(self, node: int, entry: int) -> int:
        return self.load_offset + node * self.n_entries + entry

    @property
    def com_slice(self) -> slice:
        return slice(self.com_offset, self.com_offset + self.com_size)

    @property
    def feet_slice(self) -> slice:
        return slice(self.feet_offset, self.feet_offset + self.feet_size)

    @property
    def load_slice(self) -> slice:
        return slice(self.load_offset, self.load_offset + self.load_size)

    def com_coeffs(self, w: np.ndarray) -> np.ndarray:
        return w[self.com_slice].reshape(self.n_polys, 5, 2)

    def load_values(self, w: np.ndarray) -> np.ndarray:
        return w[self.load_slice].reshape(self.n_nodes, self.n_entries)


def _pos_weights(tau: float) -> np.ndarray:
    return tau ** np.arange(5)


def _vel_weights(tau: float) -> np.ndarray:
    return np.concatenate([[0.0], np.arange(1, 5) * tau ** np.arange(4)])


def _acc_weights(tau: float) -> np.ndarray:
    return np.concatenate([[0.0, 0.0], np.arange(2, 5) * np.arange(1, 4) * tau ** np.arange(3)])


class AssembledProblem:
    """The NLP: residual/Jacobian/cost evaluators plus all index metadata."""

    def __init__(self, schedule: ContactSchedule, junctions, node_bounds,
                 geometries: Sequence[FootGeometry], nominal_stance,
                 rom_half_extents, boundary: BoundaryConditions,
                 params: PendulumParams, robust_cost: bool = True):
        self.schedule = schedule
        self.junctions = np.asarray(junctions, dtype=float)
        self.node_bounds = np.asarray(node_bounds, dtype=float)
        self.geometries = list(geometries)
        self.nominal_stance = np.asarray(nominal_stance, dtype=float).reshape(-1, 2)
        self.rom_half_extents = np.asarray(rom_half_extents, dtype=float).reshape(2)
        self.boundary = boundary
        self.params = params
        self.robust_cost = robust_cost

        if abs(self.junctions[-1] - schedule.T) > 1e-9 or abs(self.junctions[0]) > 1e-9:
            raise ValueError("segmentation must span the schedule horizon")
        if abs(self.node_bounds[-1] - schedule.T) > 1e-9:
            raise ValueError("load grid must span the schedule horizon")
        # spline segments must not straddle load-node boundaries, or the
        # piecewise-constant input would jump inside a polynomial
        for bnd in self.node_bounds:
            if np.min(np.abs(self.junctions - bnd)) > 1e-9:
                raise ValueError("every load-node boundary must be a spline junction")
        if len(self.geometries) != schedule.n_feet:
            raise ValueError("need one geometry per foot")
        if len(self.nominal_stance) != schedule.n_feet:
            raise ValueError("need one nominal stance offset per foot")

        F = schedule.n_feet
        self.timelines = [FootTimeline(schedule, f) for f in range(F)]
        self.offsets = entry_offsets(self.geometries)
        E = int(self.offsets[-1])
        n_polys = len(self.junctions) - 1
        n_nodes = len(self.node_bounds) - 1
        self.layout = DecisionLayout(
            n_polys, [tl.n_stances for tl in self.timelines],
            [g.n_vertices > 1 for g in self.geometries], n_nodes, E)

        self._goh = params.g / params.h
        self._build_rows()
        self._build_dynamics_data()
        self._build_bounds()
        self._target_flat = load_target(schedule, self.geometries,
                                        self.node_bounds).ravel()

    # ------------------------------------------------------------------
    # assembly
    # ------------------------------------------------------------------

    def _node_of_time(self, t: float) -> int:
        idx = int(np.searchsorted(self.node_bounds, t, side="right")) - 1
        return min(max(idx, 0), self.layout.n_nodes - 1)

    def _segment_of_time(self, t: float) -> int:
        idx = int(np.searchsorted(self.junctions, t, side="right")) - 1
        return min(max(idx, 0), self.layout.n_polys - 1)

    def _add_spline_row(self, rows, cols, vals, row, k, weights, axis, scale=1.0):
        for i in range(5):
            if weights[i] != 0.0:
                rows.append(row)
                cols.append(self.layout.com_index(k, i, axis))
                vals.append(scale * weights[i])

    def _add_foot_pos_row(self, rows, cols, vals, row, foot, t, axis, scale=1.0):
        j0, j1, w0, w1 = self.timelines[foot].blend(t)
        rows.append(row)
        cols.append(self.layout.stance_index(foot, j0, axis))
        vals.append(scale * w0)
        if w1 != 0.0:
            rows.append(row)
            cols.append(self.layout.stance_index(foot, j1, axis))
            vals.append(scale * w1)

    def _build_rows(self):
        lay = self.layout
        rows, cols, vals = [], [], []
        b = []
        blocks = []
        row = 0

        def block(name, kind, n, lower, upper, linear):
            nonlocal row
            blocks.append(ConstraintBlock(name, kind, slice(row, row + n),
                                          np.asarray(lower, dtype=float),
                                          np.asarray(upper, dtype=float), linear))
            row += n

        # initial state: spline value at t=0 (first polynomial, tau=0)
        x0 = self.boundary.x0
        for axis in range(2):
            self._add_spline_row(rows, cols, vals, row + axis, 0, _pos_weights(0.0), axis)
            b.append(-x0.c[axis])
        for axis in range(2):
            self._add_spline_row(rows, cols, vals, row + 2 + axis, 0, _vel_weights(0.0), axis)
            b.append(-x0.c_dot[axis])
        block("initial", "equality", 4, np.zeros(4), np.zeros(4), linear=True)

        # junction continuity
        n_cont = 4 * (lay.n_polys - 1)
        for k in range(lay.n_polys - 1):
            Tk = self.junctions[k + 1] - self.junctions[k]
            for axis in range(2):
                r = row + 4 * k + axis
                self._add_spline_row(rows, cols, vals, r, k, _pos_weights(Tk), axis)
                rows.append(r)
                cols.append(lay.com_index(k + 1, 0, axis))
                vals.append(-1.0)
                b.append(0.0)
            for axis in range(2):
                r = row + 4 * k + 2 + axis
                self._add_spline_row(rows, cols, vals, r, k, _vel_weights(Tk), axis)
                rows.append(r)
                cols.append(lay.com_index(k + 1, 1, axis))
                vals.append(-1.0)
                b.append(0.0)
        block("continuity", "equality", n_cont, np.zeros(n_cont), np.zeros(n_cont),
              linear=True)

        # dynamics at the three collocation samples of every polynomial:
        # linear part c_ddot - (g/h) c; the (g/h) u(t) part is added in
        # residuals() / jacobian() with values from _build_dynamics_data.
        goh = self._goh
        self._dyn_times = []
        self._dyn_rows_x = []
        self._dyn_rows_y = []
        n_dyn = 6 * lay.n_polys
        for k in range(lay.n_polys):
            t0, t1 = self.junctions[k], self.junctions[k + 1]
            for s, t in enumerate((t0, 0.5 * (t0 + t1), t1)):
                tau = t - t0
                weights = _acc_weights(tau) - goh * _pos_weights(tau)
                r = row + 6 * k + 2 * s
                for axis in range(2):
                    self._add_spline_row(rows, cols, vals, r + axis, k, weights, axis)
                    b.append(0.0)
                self._dyn_times.append(t)
                self._dyn_rows_x.append(r)
                self._dyn_rows_y.append(r + 1)
        block("dynamics", "equality", n_dyn, np.zeros(n_dyn), np.zeros(n_dyn),
              linear=False)

        # range of motion at every load node time plus the final time
        rom_times = np.concatenate([self.node_bounds[:-1], [self.schedule.T]])
        F = self.schedule.n_feet
        n_rom = 2 * F * len(rom_times)
        rom_lo, rom_hi = [], []
        r = row
        for t in rom_times:
            k = self._segment_of_time(t)
            tau = t - self.junctions[k]
            pw = _pos_weights(tau)
            for f in range(F):
                for axis in range(2):
                    self._add_foot_pos_row(rows, cols, vals, r, f, t, axis)
                    self._add_spline_row(rows, cols, vals, r, k, pw, axis, scale=-1.0)
                    b.append(-self.nominal_stance[f, axis])
                    rom_lo.append(-self.rom_half_extents[axis])
                    rom_hi.append(self.rom_half_extents[axis])
                    r += 1
        block("rom", "interval", n_rom, rom_lo, rom_hi, linear=True)

        # loads sum to one per node
        for i in range(lay.n_nodes):
            for e in range(lay.n_entries):
                rows.append(row + i)
                cols.append(lay.load_index(i, e))
                vals.append(1.0)
            b.append(-1.0)
        block("load_sum", "equality", lay.n_nodes,
              np.zeros(lay.n_nodes), np.zeros(lay.n_nodes), linear=True)

        # terminal state
        xT = self.boundary.xT
        k_last = lay.n_polys - 1
        tau_T = self.junctions[-1] - self.junctions[-2]
        n_term = 0
        if self.boundary.fix_terminal_position:
            for axis in range(2):
                self._add_spline_row(rows, cols, vals, row + n_term, k_last,
                                     _pos_weights(tau_T), axis)
                b.append(-xT.c[axis])
                n_term += 1
        if self.boundary.fix_terminal_velocity:
            for axis in range(2):
                self._add_spline_row(rows, cols, vals, row + n_term, k_last,
                                     _vel_weights(tau_T), axis)
                b.append(-xT.c_dot[axis])
                n_term += 1
        block("terminal", "equality", n_term, np.zeros(n_term), np.zeros(n_term),
              linear=True)

        self.blocks = blocks
        self.n_constraints = row
        self._A = sp.csr_matrix(
            (vals, (rows, cols)), shape=(self.n_constraints, lay.dim))
        self._AT = sp.csr_matrix(self._A.T)
        self._b = np.asarray(b, dtype=float)
        self.constraint_lower = np.concatenate([blk.lower for blk in blocks])
        self.constraint_upper = np.concatenate([blk.upper for blk in blocks])

    def _build_dynamics_data(self):
        lay = self.layout
        F = self.schedule.n_feet
        E = lay.n_entries
        times = np.asarray(self._dyn_times)
        S = len(times)
        self._S = S
        rows_x = np.asarray(self._dyn_rows_x)
        rows_y = np.asarray(self._dyn_rows_y)
        self._rows_x, self._rows_y = rows_x, rows_y

        # All three samples of a segment use the load node covering that
        # segment (its input is constant there); for the start sample this
        # coincides with the right-continuous lookup, and for the end
        # sample it keeps the collocated ODE on the correct side of the
        # input jump. Segments never straddle node boundaries.
        mids = 0.5 * (self.junctions[:-1] + self.junctions[1:])
        node_of_segment = np.array([self._node_of_time(t) for t in mids])
        node_of = np.repeat(node_of_segment, 3)
        self._lam_idx = (lay.load_offset + node_of[:, None] * E
                         + np.arange(E)[None, :])

        ix0 = np.zeros((S, F), dtype=int)
        iy0 = np.zeros((S, F), dtype=int)
        ix1 = np.zeros((S, F), dtype=int)
        iy1 = np.zeros((S, F), dtype=int)
        w0 = np.zeros((S, F))
        w1 = np.zeros((S, F))
        ia0 = np.zeros((S, F), dtype=int)
        ia1 = np.zeros((S, F), dtype=int)
        for s, t in enumerate(times):
            for f in range(F):
                j0, j1, a0, a1 = self.timelines[f].blend(t)
                ix0[s, f] = lay.stance_index(f, j0, 0)
                iy0[s, f] = lay.stance_index(f, j0, 1)
                ix1[s, f] = lay.stance_index(f, j1, 0)
                iy1[s, f] = lay.stance_index(f, j1, 1)
                w0[s, f] = a0
                w1[s, f] = a1
                if lay.has_alpha[f]:
                    ia0[s, f] = lay.stance_index(f, j0, 2)
                    ia1[s, f] = lay.stance_index(f, j1, 2)
        self._ix0, self._iy0, self._ix1, self._iy1 = ix0, iy0, ix1, iy1
        self._w0, self._w1 = w0, w1
        self._alpha_mask = np.asarray(lay.has_alpha, dtype=bool)
        self._ia0, self._ia1 = ia0, ia1

        foe = np.concatenate([[f] * g.n_vertices
                              for f, g in enumerate(self.geometries)]).astype(int)
        self._foe = foe
        verts = np.vstack([g.array for g in self.geometries])
        self._pvx, self._pvy = verts[:, 0], verts[:, 1]
        self._foot_indicator = np.zeros((E, F))
        self._foot_indicator[np.arange(E), foe] = 1.0

        # fixed sparsity pattern of the dynamic Jacobian entries
        rx = np.repeat(rows_x, E)
        ry = np.repeat(rows_y, E)
        rfx = np.repeat(rows_x, F)
        rfy = np.repeat(rows_y, F)
        pat_rows = [rx, ry, rfx, rfx, rfy, rfy]
        pat_cols = [self._lam_idx.ravel(), self._lam_idx.ravel(),
                    ix0.ravel(), ix1.ravel(), iy0.ravel(), iy1.ravel()]
        self._n_alpha = int(self._alpha_mask.sum())
        if self._n_alpha:
            af = np.where(self._alpha_mask)[0]
            self._af = af
            rfa_x = np.repeat(rows_x, len(af))
            rfa_y = np.repeat(rows_y, len(af))
            pat_rows += [rfa_x, rfa_x, rfa_y, rfa_y]
            pat_cols += [ia0[:, af].ravel(), ia1[:, af].ravel(),
                         ia0[:, af].ravel(), ia1[:, af].ravel()]
        self._dyn_rows = np.concatenate(pat_rows)
        self._dyn_cols = np.concatenate(pat_cols)

    def _build_bounds(self):
        lay = self.layout
        lb = np.full(lay.dim, -np.inf)
        ub = np.full(lay.dim, np.inf)
        lb[lay.load_slice] = 0.0
        for i in range(lay.n_nodes):
            flags = self.schedule.contact_flags(self.node_bounds[i])
            for f in range(self.schedule.n_feet):
                top = 1.0 if flags[f] else 0.0
                for e in range(int(self.offsets[f]), int(self.offsets[f + 1])):
                    ub[lay.load_index(i, e)] = top
        self.variable_lower = lb
        self.variable_upper = ub

    # ------------------------------------------------------------------
    # evaluation
    # ------------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.layout.dim

    @property
    def n_variables(self) -> int:
        return self.layout.dim

    def variable_bounds(self):
        return self.variable_lower, self.variable_upper

    def constraint_bounds(self):
        return self.constraint_lower, self.constraint_upper

    def _foot_world(self, w):
        """World vertex coordinates and per-foot yaw at all dynamic samples."""
        px = w[self._ix0] * self._w0 + w[self._ix1] * self._w1
        py = w[self._iy0] * self._w0 + w[self._iy1] * self._w1
        al = (w[self._ia0] * self._w0 + w[self._ia1] * self._w1) * self._alpha_mask
        ca, sa = np.cos(al), np.sin(al)
        foe = self._foe
        cae, sae = ca[:, foe], sa[:, foe]
        wx = px[:, foe] + cae * self._pvx - sae * self._pvy
        wy = py[:, foe] + sae * self._pvx + cae * self._pvy
        return wx, wy, cae, sae

    def residuals(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        r = self._A @ w + self._b
        wx, wy, _, _ = self._foot_world(w)
        lam = w[self._lam_idx]
        r[self._rows_x] += self._goh * (lam * wx).sum(axis=1)
        r[self._rows_y] += self._goh * (lam * wy).sum(axis=1)
        return r

    def _dyn_values(self, w):
        goh = self._goh
        wx, wy, cae, sae = self._foot_world(w)
        lam = w[self._lam_idx]
        lamsum = lam @ self._foot_indicator
        parts = [goh * wx.ravel(), goh * wy.ravel(),
                 (goh * lamsum * self._w0).ravel(),
                 (goh * lamsum * self._w1).ravel(),
                 (goh * lamsum * self._w0).ravel(),
                 (goh * lamsum * self._w1).ravel()]
        if self._n_alpha:
            af = self._af
            gx = ((lam * (-sae * self._pvx - cae * self._pvy))
                  @ self._foot_indicator)[:, af]
            gy = ((lam * (cae * self._pvx - sae * self._pvy))
                  @ self._foot_indicator)[:, af]
            w0a, w1a = self._w0[:, af], self._w1[:, af]
            parts += [(goh * gx * w0a).ravel(), (goh * gx * w1a).ravel(),
                      (goh * gy * w0a).ravel(), (goh * gy * w1a).ravel()]
        return np.concatenate(parts)

    def jacobian(self, w: np.ndarray) -> sp.csr_matrix:
        w = np.asarray(w, dtype=float)
        dyn = sp.coo_matrix((self._dyn_values(w), (self._dyn_rows, self._dyn_cols)),
                            shape=self._A.shape)
        return (self._A + dyn.tocsr()).tocsr()

    def linearize(self, w: np.ndarray):
        """Residuals plus a fast J(w)^T v operator sharing the evaluation."""
        w = np.asarray(w, dtype=float)
        r = self.residuals(w)
        vals = self._dyn_values(w)
        rows, cols, n = self._dyn_rows, self._dyn_cols, self.layout.dim

        def jt(v):
            out = self._AT @ v
            out += np.bincount(cols, weights=vals * v[rows], minlength=n)
            return out

        return r, jt

    def cost_and_grad(self, w: np.ndarray):
        grad = np.zeros(self.layout.dim)
        if not self.robust_cost:
            return 0.0, grad
        d = w[self.layout.load_slice] - self._target_flat
        grad[self.layout.load_slice] = 2.0 * d
        return float(d @ d), grad

    def cost_hessian_diag(self, w: np.ndarray) -> np.ndarray:
        diag = np.zeros(self.layout.dim)
        if self.robust_cost:
            diag[self.layout.load_slice] = 2.0
        return diag

    # ------------------------------------------------------------------
    # helpers for seeding, decoding and inspection
    # ------------------------------------------------------------------

    def initial_guess(self) -> np.ndarray:
        """Standing start: constant CoM spline at x0, nominal footholds,
        loads at the equal-distribution target."""
        lay = self.layout
        w = np.zeros(lay.dim)
        coeffs = lay.com_coeffs(w)
        coeffs[:, 0, :] = self.boundary.x0.c
        for f in range(self.schedule.n_feet):
            for j in range(lay.n_stances[f]):
                w[lay.stance_index(f, j, 0)] = self.boundary.x0.c[0] + self.nominal_stance[f, 0]
                w[lay.stance_index(f, j, 1)] = self.boundary.x0.c[1] + self.nominal_stance[f, 1]
        w[lay.load_slice] = self._target_flat
        return w

    def decode(self, w: np.ndarray) -> Motion:
        lay = self.layout
        w = np.asarray(w, dtype=float)
        spline = ComSpline.from_junctions(self.junctions, lay.com_coeffs(w).copy())
        positions, orientations = [], []
        for f in range(self.schedule.n_feet):
            ns = lay.n_stances[f]
            pos = np.array([[w[lay.stance_index(f, j, 0)],
                             w[lay.stance_index(f, j, 1)]] for j in range(ns)])
            if lay.has_alpha[f]:
                ang = np.array([w[lay.stance_index(f, j, 2)] for j in range(ns)])
            else:
                ang = np.zeros(ns)
            positions.append(pos)
            orientations.append(ang)
        plan = FootPlan(self.schedule, self.geometries, positions, orientations)
        loads = LoadProfile(self.node_bounds, lay.load_values(w).copy(),
                            self.geometries)
        return Motion(spline, plan, loads, self.schedule, self.params,
                      self.nominal_stance, self.rom_half_extents)

    def dynamics_residual(self, w: np.ndarray, k: int, sample: str) -> np.ndarray:
        """Residual (2,) of one collocation condition; sample is
        'start', 'mid' or 'end' of polynomial k."""
        s = 3 * k + {"start": 0, "mid": 1, "end": 2}[sample]
        r = self.residuals(np.asarray(w, dtype=float))
        return np.array([r[self._rows_x[s]], r[self._rows_y[s]]])

    def rom_residual(self, w: np.ndarray, foot: int, t: float) -> np.ndarray:
        """Foot-to-CoM offset minus the nominal stance at time t (2,)."""
        motion = self.decode(w)
        p, _ = motion.plan.foot_pose(foot, t)
        pos, _, _ = motion.spline.evaluate(t)
        return p - pos - self.nominal_stance[foot]

    def block(self, name: str) -> ConstraintBlock:
        for blk in self.blocks:
            if blk.name == name:
                return blk
        raise KeyError(name)


def assemble(schedule: ContactSchedule, junctions, node_bounds,
             geometries: Sequence[FootGeometry], nominal_stance,
             rom_half_extents, boundary: BoundaryConditions,
             params: PendulumParams, robust_cost: bool = True) -> AssembledProblem:
    """Build the full NLP for a scenario. See the module docstring for the
    variable layout and constraint ordering."""
    return AssembledProblem(schedule, junctions, node_bounds, geometries,
                            nominal_stance, rom_half_extents, boundary, params,
                            robust_cost=robust_cost)
