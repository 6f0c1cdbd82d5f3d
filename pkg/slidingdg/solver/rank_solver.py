"""DGSEM solver of one rank.

A rank owns a contiguous block of elements of a single motion group. Faces to
elements of other ranks follow the primary/replica protocol: the replica side
sends its solution, the primary side solves the Riemann problem and sends the
flux back. Sliding interfaces do the same on mortars, the static side being
primary. Viscous runs add two rounds for the lifted surface values and the
gradients.
"""

import copy
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from slidingdg.basis import NodeKind, build_basis_operators, build_node_set
from slidingdg.errors import ConfigurationError, SolverAbort
from slidingdg.logger import get_logger
from slidingdg.mesh import BoundaryKind, Mesh, SlidingInterface, advance_displacement, sigma_from_displacement
from slidingdg.mortar import (
    MortarOperators,
    MortarSide,
    build_mortar_operators,
    project_flux_to_face,
    transfer_solution_to_mortars,
)
from slidingdg.parallel import (
    CONFORMING,
    InProcessNetwork,
    LocalFace,
    OwnedFace,
    PendingExchange,
    RankAssignment,
    RankMaps,
    assign_ranks,
    build_schedule,
    combine_index_arrays,
    exchange_mortar_data,
    exchange_rank_maps,
    rebuild_index_arrays,
)
from slidingdg.parallel.transport import Endpoint
from slidingdg.physics import ExactSolution, GasModel
from slidingdg.physics.fluxes import ale_fluxes, viscous_fluxes
from slidingdg.physics.gas import NVAR, lifting_variables
from slidingdg.physics.riemann import roe_fluxes
from slidingdg.solver.boundary import apply_boundary, make_boundary
from slidingdg.solver.field import FaceDataArrays, SolutionField, check_positivity
from slidingdg.solver.operator import contravariant, face_traces, surface_integral, volume_integral
from slidingdg.solver.timestepping import CARPENTER_KENNEDY_RK4, RKScheme, rk_step

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class _FaceSet:
    """Conforming or boundary faces touching this rank, with local element ids."""

    ids: np.ndarray
    elem: np.ndarray
    side: np.ndarray
    normal: np.ndarray
    surf: np.ndarray
    vg_normal: np.ndarray
    other_elem: np.ndarray | None = None
    other_side: np.ndarray | None = None

    @property
    def size(self) -> int:
        return int(self.ids.size)


@dataclass(eq=False)
class _MortarBlock:
    faces: list[LocalFace]
    elements: np.ndarray
    side: int
    index_array: np.ndarray | None = None
    local_slots: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=np.int64))
    offset: int = 0

    @property
    def size(self) -> int:
        return int(self.elements.size)

    @property
    def slots(self) -> np.ndarray:
        """Position of mortar (face k, i_sub) in the rank's sorted mortar array."""
        return self.local_slots + self.offset


@dataclass(eq=False)
class _InterfaceState:
    iface: SlidingInterface
    maps: RankMaps
    static: _MortarBlock
    moving: _MortarBlock
    n_delta: int = -1


@dataclass(eq=False)
class _Stage:
    traces: np.ndarray
    mortar_ops: list[MortarOperators]
    u_boundary: np.ndarray
    t: float


def _partner_index(partners: np.ndarray) -> np.ndarray:
    entries = np.empty(partners.size, dtype=[("iface", np.int64), ("partner", np.int64)])
    entries["iface"] = CONFORMING
    entries["partner"] = partners
    return entries


class RankSolver:
    """
    Owns the elements of one rank and advances them in time.

    Args:
        mesh (Mesh): Global mesh, read only.
        assignment (RankAssignment): Element ownership of all ranks.
        rank (int): This rank.
        endpoint (Endpoint): Transport endpoint of this rank.
        degree (int): Polynomial degree N.
        gas (GasModel): Gas model.
        solution (ExactSolution | None): Case providing boundary data and sources.
        node_kind (NodeKind): Interpolation nodes.
        scheme (RKScheme): Time integrator.
        t0 (float): Initial time.
    """

    def __init__(
        self,
        mesh: Mesh,
        assignment: RankAssignment,
        rank: int,
        endpoint: Endpoint,
        degree: int,
        gas: GasModel,
        solution: ExactSolution | None = None,
        node_kind: NodeKind = NodeKind.LOBATTO,
        scheme: RKScheme = CARPENTER_KENNEDY_RK4,
        t0: float = 0.0,
    ):
        self.mesh = mesh
        self.rank = rank
        self.endpoint = endpoint
        self.gas = gas
        self.solution = solution
        self.scheme = scheme
        self.nodeset = build_node_set(degree, node_kind)
        self.ops = build_basis_operators(self.nodeset)
        self.n = self.nodeset.size
        self.step = -1
        self.stage = -1

        self.elements = assignment.elements_of(rank)
        self._local = np.full(mesh.n_elements, -1, dtype=np.int64)
        self._local[self.elements] = np.arange(self.elements.size)
        self.metrics = mesh.metrics.subset(self.elements)
        self.velocity = mesh.velocity[self.elements]
        self.x0 = mesh.node_coordinates(self.nodeset, 0.0, self.elements)
        self._has_source = (
            solution is not None and solution.source(self.x0[:1], t0, gas) is not None
        )

        self._with_lifting = gas.is_viscous

        owner = assignment.owner
        self._setup_conforming(owner)
        self._setup_boundary(owner)
        self._setup_interfaces(owner, t0)

    # --- setup ---

    def _face_set(self, ids: np.ndarray, elem: np.ndarray, side: np.ndarray, faces, other=None) -> _FaceSet:
        return _FaceSet(
            ids=ids,
            elem=self._local[elem[ids]],
            side=side[ids],
            normal=faces.normal[ids],
            surf=faces.surf[ids],
            vg_normal=faces.vg_normal[ids],
            other_elem=None if other is None else self._local[other[0][ids]],
            other_side=None if other is None else other[1][ids],
        )

    def _setup_conforming(self, owner: np.ndarray) -> None:
        faces = self.mesh.faces
        rank = self.rank
        om = owner[faces.minus_elem]
        op = owner[faces.plus_elem]
        local = np.flatnonzero((om == rank) & (op == rank))
        primary = np.flatnonzero((om == rank) & (op != rank))
        replica = np.flatnonzero((op == rank) & (om != rank))
        # outer key partner rank, inner key global face id
        primary = primary[np.lexsort((primary, op[primary]))]
        replica = replica[np.lexsort((replica, om[replica]))]

        self._local_faces = self._face_set(
            local, faces.minus_elem, faces.minus_side, faces, (faces.plus_elem, faces.plus_side)
        )
        self._primary_faces = self._face_set(primary, faces.minus_elem, faces.minus_side, faces)
        self._replica_faces = self._face_set(replica, faces.plus_elem, faces.plus_side, faces)
        self._sched_primary = build_schedule(_partner_index(op[primary]), rank)
        self._sched_replica = build_schedule(_partner_index(om[replica]), rank)

    def _setup_boundary(self, owner: np.ndarray) -> None:
        boundary = self.mesh.boundary
        owned = np.flatnonzero(owner[boundary.elem] == self.rank)
        self._boundary_faces = self._face_set(owned, boundary.elem, boundary.side, boundary)
        self.boundary = None
        if boundary.size:
            self.boundary = make_boundary(BoundaryKind.DIRICHLET, self.solution)

    def _setup_interfaces(self, owner: np.ndarray, t0: float) -> None:
        self.interfaces = [copy.copy(iface) for iface in self.mesh.interfaces]
        owned_faces: list[OwnedFace] = []
        blocks: list[tuple[_MortarBlock, _MortarBlock]] = []
        for iface in self.interfaces:
            iface.set_displacement(iface.velocity * t0)
            roles = []
            for role, elements, side in (
                ("static", iface.static_elements, iface.static_side),
                ("moving", iface.moving_elements, iface.moving_side),
            ):
                owned = [i for i in range(iface.n_faces_par) if owner[elements[i]] == self.rank]
                owned_faces.extend(OwnedFace(iface.id, role, i, 0) for i in owned)
                roles.append(
                    _MortarBlock(
                        faces=[LocalFace(i_par=i, i_perp=0, i_face=k) for k, i in enumerate(owned)],
                        elements=self._local[elements[owned]] if owned else np.zeros(0, dtype=np.int64),
                        side=side,
                    )
                )
            blocks.append((roles[0], roles[1]))

        extents = {iface.id: (iface.n_faces_par, 1) for iface in self.interfaces}
        rank_maps = exchange_rank_maps(self.endpoint, owned_faces, extents)
        self._iface_states = [
            _InterfaceState(iface=iface, maps=rank_maps[iface.id], static=static, moving=moving)
            for iface, (static, moving) in zip(self.interfaces, blocks)
        ]
        self.rebuild_counts = {iface.id: 0 for iface in self.interfaces}
        for state in self._iface_states:
            self._rebuild(state, state.iface.n_delta)
        self._refresh_schedules()

    def _rebuild(self, state: _InterfaceState, n_delta: int) -> None:
        for role, block in ((MortarSide.STATIC, state.static), (MortarSide.MOVING, state.moving)):
            block.index_array, mapping = rebuild_index_arrays(block.faces, state.maps, n_delta, role)
            block.local_slots = mapping.table.T.copy()
        state.n_delta = n_delta
        logger.debug(
            f"Rank {self.rank} sorted mortars of interface {state.iface.id} for n_delta={n_delta}: "
            f"static partners {sorted(set(state.static.index_array['partner'].tolist()))}, "
            f"moving partners {sorted(set(state.moving.index_array['partner'].tolist()))}"
        )

    def _refresh_schedules(self) -> None:
        n_delta = {state.iface.id: state.n_delta for state in self._iface_states}
        for role in ("static", "moving"):
            offset = 0
            for state in self._iface_states:
                block: _MortarBlock = getattr(state, role)
                block.offset = offset
                offset += 2 * block.size
        static_all = combine_index_arrays([state.static.index_array for state in self._iface_states])
        moving_all = combine_index_arrays([state.moving.index_array for state in self._iface_states])
        self._sched_static = build_schedule(static_all, self.rank, n_delta)
        self._sched_moving = build_schedule(moving_all, self.rank, n_delta)
        normals = np.array([iface.normal for iface in self.interfaces]).reshape(-1, 2)
        self._mortar_normals = normals[static_all["iface"]] if static_all.size else np.zeros((0, 2))
        self.face_data = FaceDataArrays.allocate(
            self.n,
            self._primary_faces.size,
            self._replica_faces.size,
            static_all.size,
            moving_all.size,
            self._with_lifting,
        )

    # --- geometry and exchange helpers ---

    def _stage_geometry(self, offset: float) -> list[MortarOperators]:
        """Mortar operators at the stage time; re-sort mortars when n_delta changed."""
        changed = False
        mortar_ops = []
        for state in self._iface_states:
            n_total, s_delta = state.iface.stage_displacement(offset)
            n_delta = n_total % state.iface.n_faces_par
            if n_delta != state.n_delta:
                self._rebuild(state, n_delta)
                self.rebuild_counts[state.iface.id] += 1
                changed = True
            mortar_ops.append(build_mortar_operators(self.nodeset, sigma_from_displacement(s_delta)))
        if changed:
            self._refresh_schedules()
        return mortar_ops

    def _exchange(
        self,
        out_conforming: np.ndarray,
        in_conforming: np.ndarray,
        out_mortar: np.ndarray,
        in_mortar: np.ndarray,
        kind: str,
        to_primary: bool,
    ) -> list[PendingExchange]:
        if to_primary:
            conforming = (self._sched_replica, self._sched_primary)
            mortar = (self._sched_moving, self._sched_static)
        else:
            conforming = (self._sched_primary, self._sched_replica)
            mortar = (self._sched_static, self._sched_moving)
        return [
            exchange_mortar_data(
                self.endpoint, conforming[0], out_conforming, conforming[1], in_conforming, kind
            ),
            exchange_mortar_data(
                self.endpoint, mortar[0], out_mortar, mortar[1], in_mortar, f"{kind}_sm"
            ),
        ]

    def _faces_to_mortars(
        self, side_values: np.ndarray, role: MortarSide, mortar_ops: list[MortarOperators]
    ) -> np.ndarray:
        total = sum(2 * getattr(state, role.value).size for state in self._iface_states)
        out = np.empty((total,) + side_values.shape[2:])
        for state, ops in zip(self._iface_states, mortar_ops):
            block: _MortarBlock = getattr(state, role.value)
            if not block.size:
                continue
            sub0, sub1 = transfer_solution_to_mortars(side_values[block.elements, block.side], ops, role)
            out[block.slots[:, 0]] = sub0
            out[block.slots[:, 1]] = sub1
        return out

    def _mortars_to_faces(
        self,
        mortar_values: np.ndarray,
        role: MortarSide,
        mortar_ops: list[MortarOperators],
        side_values: np.ndarray,
        sign: float,
        scale: bool,
    ) -> None:
        for state, ops in zip(self._iface_states, mortar_ops):
            block: _MortarBlock = getattr(state, role.value)
            if not block.size:
                continue
            face = project_flux_to_face(
                (mortar_values[block.slots[:, 0]], mortar_values[block.slots[:, 1]]), ops, role
            )
            if scale:
                face = face * self.metrics.surf[block.elements, block.side][:, None, None]
            side_values[block.elements, block.side] = sign * face

    def _numerical_flux(
        self,
        u_left: np.ndarray,
        u_right: np.ndarray,
        normal: np.ndarray,
        vg_normal: np.ndarray,
        q_left: np.ndarray | None = None,
        q_right: np.ndarray | None = None,
    ) -> np.ndarray:
        normal = normal[:, None, :]
        flux = roe_fluxes(u_left, u_right, normal, np.asarray(vg_normal)[:, None], self.gas)
        if q_left is not None:
            g1_l, g2_l = viscous_fluxes(u_left, q_left, self.gas)
            g1_r, g2_r = viscous_fluxes(u_right, q_right, self.gas)
            flux = flux - 0.5 * (
                (g1_l + g1_r) * normal[..., 0, None] + (g2_l + g2_r) * normal[..., 1, None]
            )
        return flux

    def _boundary_states(self, traces: np.ndarray, t: float) -> np.ndarray:
        faces = self._boundary_faces
        u_inner = traces[faces.elem, faces.side]
        if not faces.size:
            return u_inner
        x = self.x0[faces.elem] + t * self.velocity[faces.elem][:, None, None, :]
        x_faces = face_traces(x, self.ops)[np.arange(faces.size), faces.side]
        return apply_boundary(self.boundary, u_inner, x_faces, t)

    # --- spatial operator ---

    def _post_solution(self, u: np.ndarray, t: float, offset: float) -> tuple[_Stage, list[PendingExchange]]:
        check_positivity(u, self.gas, self.elements, self.rank, self.step, self.stage)
        mortar_ops = self._stage_geometry(offset)
        data = self.face_data
        traces = face_traces(u, self.ops)
        data.U_out[:] = traces[self._replica_faces.elem, self._replica_faces.side]
        data.U_out_sm[:] = self._faces_to_mortars(traces, MortarSide.MOVING, mortar_ops)
        pending = self._exchange(
            data.U_out, data.U_replica, data.U_out_sm, data.U_replica_sm, "U", to_primary=True
        )
        data.U_primary[:] = traces[self._primary_faces.elem, self._primary_faces.side]
        data.U_primary_sm[:] = self._faces_to_mortars(traces, MortarSide.STATIC, mortar_ops)
        stage = _Stage(
            traces=traces, mortar_ops=mortar_ops, u_boundary=self._boundary_states(traces, t), t=t
        )
        return stage, pending

    def _gradient(self, w: np.ndarray, w_star: np.ndarray) -> np.ndarray:
        metrics = self.metrics
        q = np.empty(w.shape[:3] + (2, NVAR))
        jac = metrics.jac[:, None, None, None]
        for d in (0, 1):
            vol = volume_integral(
                self.ops,
                metrics.ja1[:, d, None, None, None] * w,
                metrics.ja2[:, d, None, None, None] * w,
            )
            scaled_normal = metrics.normals[:, :, d] * metrics.surf
            surf = surface_integral(self.ops, w_star * scaled_normal[:, :, None, None])
            q[..., d, :] = (surf - vol) / jac
        return q

    def _lift(self, u: np.ndarray, stage: _Stage) -> tuple[np.ndarray, np.ndarray]:
        gas = self.gas
        data = self.face_data
        v = data.viscous
        w_traces = lifting_variables(stage.traces, gas)
        w_star = np.empty_like(w_traces)

        local = self._local_faces
        mean = 0.5 * (w_traces[local.elem, local.side] + w_traces[local.other_elem, local.other_side])
        w_star[local.elem, local.side] = mean
        w_star[local.other_elem, local.other_side] = mean

        v["W_primary"][:] = 0.5 * (lifting_variables(data.U_primary, gas) + lifting_variables(data.U_replica, gas))
        v["W_primary_sm"][:] = 0.5 * (
            lifting_variables(data.U_primary_sm, gas) + lifting_variables(data.U_replica_sm, gas)
        )
        pending = self._exchange(
            v["W_primary"], v["W_replica"], v["W_primary_sm"], v["W_replica_sm"], "W", to_primary=False
        )
        w_star[self._primary_faces.elem, self._primary_faces.side] = v["W_primary"]
        bnd = self._boundary_faces
        w_star[bnd.elem, bnd.side] = 0.5 * (
            w_traces[bnd.elem, bnd.side] + lifting_variables(stage.u_boundary, gas)
        )
        self._mortars_to_faces(
            v["W_primary_sm"], MortarSide.STATIC, stage.mortar_ops, w_star, 1.0, scale=False
        )
        for exchange in pending:
            exchange.wait()
        w_star[self._replica_faces.elem, self._replica_faces.side] = v["W_replica"]
        self._mortars_to_faces(
            v["W_replica_sm"], MortarSide.MOVING, stage.mortar_ops, w_star, 1.0, scale=False
        )

        q = self._gradient(lifting_variables(u, gas), w_star)
        q_traces = face_traces(q, self.ops)
        v["Q_out"][:] = q_traces[self._replica_faces.elem, self._replica_faces.side]
        v["Q_out_sm"][:] = self._faces_to_mortars(q_traces, MortarSide.MOVING, stage.mortar_ops)
        pending = self._exchange(
            v["Q_out"], v["Q_replica"], v["Q_out_sm"], v["Q_replica_sm"], "Q", to_primary=True
        )
        v["Q_primary"][:] = q_traces[self._primary_faces.elem, self._primary_faces.side]
        v["Q_primary_sm"][:] = self._faces_to_mortars(q_traces, MortarSide.STATIC, stage.mortar_ops)
        for exchange in pending:
            exchange.wait()
        return q, q_traces

    def _surface_fluxes(self, stage: _Stage, q_traces: np.ndarray | None) -> np.ndarray:
        data = self.face_data
        v = data.viscous
        viscous = q_traces is not None
        traces = stage.traces
        side_flux = np.empty_like(traces)

        faces = self._primary_faces
        data.F_primary[:] = self._numerical_flux(
            data.U_primary,
            data.U_replica,
            faces.normal,
            faces.vg_normal,
            v.get("Q_primary") if viscous else None,
            v.get("Q_replica") if viscous else None,
        )
        data.F_primary_sm[:] = self._numerical_flux(
            data.U_primary_sm,
            data.U_replica_sm,
            self._mortar_normals,
            np.zeros(self._mortar_normals.shape[0]),
            v.get("Q_primary_sm") if viscous else None,
            v.get("Q_replica_sm") if viscous else None,
        )
        pending = self._exchange(
            data.F_primary, data.F_replica, data.F_primary_sm, data.F_replica_sm, "F", to_primary=False
        )

        side_flux[faces.elem, faces.side] = data.F_primary * faces.surf[:, None, None]
        local = self._local_faces
        flux = self._numerical_flux(
            traces[local.elem, local.side],
            traces[local.other_elem, local.other_side],
            local.normal,
            local.vg_normal,
            q_traces[local.elem, local.side] if viscous else None,
            q_traces[local.other_elem, local.other_side] if viscous else None,
        ) * local.surf[:, None, None]
        side_flux[local.elem, local.side] = flux
        side_flux[local.other_elem, local.other_side] = -flux

        bnd = self._boundary_faces
        if bnd.size:
            q_inner = q_traces[bnd.elem, bnd.side] if viscous else None
            side_flux[bnd.elem, bnd.side] = self._numerical_flux(
                traces[bnd.elem, bnd.side], stage.u_boundary, bnd.normal, bnd.vg_normal, q_inner, q_inner
            ) * bnd.surf[:, None, None]
        self._mortars_to_faces(
            data.F_primary_sm, MortarSide.STATIC, stage.mortar_ops, side_flux, 1.0, scale=True
        )

        for exchange in pending:
            exchange.wait()
        replica = self._replica_faces
        side_flux[replica.elem, replica.side] = -data.F_replica * replica.surf[:, None, None]
        self._mortars_to_faces(
            data.F_replica_sm, MortarSide.MOVING, stage.mortar_ops, side_flux, -1.0, scale=True
        )
        return side_flux

    def dg_residual(self, u: np.ndarray, t: float, offset: float = 0.0) -> np.ndarray:
        """
        Time derivative of the nodal states of this rank's elements.

        All ranks must call this collectively for the same stage. Outgoing
        face data is posted first and the volume term is computed while it
        travels.

        Args:
            u (np.ndarray): Local nodal states (ne, N+1, N+1, 4).
            t (float): Stage time.
            offset (float): Stage time minus the time of the stored interface
                displacement.

        Returns:
            np.ndarray: dU/dt with the shape of u.
        """
        stage, pending = self._post_solution(u, t, offset)
        metrics = self.metrics
        f1, f2 = ale_fluxes(u, self.velocity[:, None, None, :], self.gas)
        volume = volume_integral(
            self.ops, contravariant(metrics.ja1, f1, f2), contravariant(metrics.ja2, f1, f2)
        )
        for exchange in pending:
            exchange.wait()

        q_traces = None
        if self.gas.is_viscous:
            q, q_traces = self._lift(u, stage)
            g1, g2 = viscous_fluxes(u, q, self.gas)
            volume = volume - volume_integral(
                self.ops, contravariant(metrics.ja1, g1, g2), contravariant(metrics.ja2, g1, g2)
            )
        side_flux = self._surface_fluxes(stage, q_traces)
        rhs = (volume - surface_integral(self.ops, side_flux)) / metrics.jac[:, None, None, None]
        if self._has_source:
            x = self.x0 + t * self.velocity[:, None, None, :]
            rhs = rhs + self.solution.source(x, t, self.gas)
        return rhs

    def br1_lift(self, u: np.ndarray, t: float = 0.0, offset: float = 0.0) -> np.ndarray:
        """
        Gradients of (rho, v1, v2, T) by the first Bassi-Rebay method.

        The surface value is the mean of both traces; collective over ranks
        like dg_residual.

        Args:
            u (np.ndarray): Local nodal states.
            t (float): Stage time.
            offset (float): Offset from the stored interface displacement.

        Returns:
            np.ndarray: Gradients (ne, N+1, N+1, 2, 4), axis -2 the direction.
        """
        if not self._with_lifting:
            self._with_lifting = True
            self._refresh_schedules()
        stage, pending = self._post_solution(u, t, offset)
        for exchange in pending:
            exchange.wait()
        q, _ = self._lift(u, stage)
        return q

    # --- time stepping ---

    def _enter_stage(self, stage: int) -> None:
        self.stage = stage
        self.endpoint.trace.set_context(self.step, stage)

    def run(
        self,
        u: np.ndarray,
        dt: float,
        n_steps: int,
        t0: float = 0.0,
        on_step: Callable[[int, np.ndarray], None] | None = None,
    ) -> SolutionField:
        """
        Advance the local field by n_steps fixed steps of size dt.

        Args:
            u (np.ndarray): Local initial states.
            dt (float): Time step.
            n_steps (int): Number of steps.
            t0 (float): Initial time.
            on_step (Callable[[int, np.ndarray], None] | None): Called after each step.

        Returns:
            SolutionField: Local states at t0 + n_steps * dt.
        """
        self.endpoint.enter_run_phase()
        for step in range(n_steps):
            self.step = step
            t = t0 + step * dt
            try:
                u = rk_step(u, t, dt, self.dg_residual, self.scheme, on_stage=self._enter_stage)
            except SolverAbort as e:
                if e.rank is not None:
                    raise
                raise SolverAbort(
                    e.message, rank=self.rank, step=step, stage=e.stage, element=e.element
                ) from e
            for iface in self.interfaces:
                advance_displacement(iface, dt)
            if on_step is not None:
                on_step(step, u)
        return SolutionField(u=u, t=t0 + n_steps * dt, elements=self.elements)


def build_serial_solver(
    mesh: Mesh,
    degree: int,
    gas: GasModel,
    solution: ExactSolution | None = None,
    node_kind: NodeKind = NodeKind.LOBATTO,
) -> RankSolver:
    """Solver owning every element, with a rank-local endpoint."""
    if mesh.boundary.size and solution is None:
        raise ConfigurationError("Meshes with boundary faces need an exact solution")
    return RankSolver(
        mesh,
        assign_ranks(mesh, 1),
        0,
        InProcessNetwork(1).endpoint(0),
        degree,
        gas,
        solution,
        node_kind,
    )
