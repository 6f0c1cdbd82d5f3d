"""Post-run check of a communication trace against what the rank maps allow."""

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from slidingdg.mesh import Mesh
from slidingdg.mortar import moving_index
from slidingdg.parallel.ranks import RankAssignment
from slidingdg.parallel.transport import COLLECTIVE_KINDS, ITEMSIZE, Phase
from slidingdg.physics.gas import NVAR

# values per node carried by each message kind
KIND_VALUES = {"U": NVAR, "F": NVAR, "W": NVAR, "Q": 2 * NVAR}
# kinds sent by the replica side; the rest travel primary -> replica
REPLICA_KINDS = {"U", "Q"}


@dataclass
class AuditReport:
    n_messages: int = 0
    n_collectives_init: int = 0
    n_collectives_run: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        verdict = "PASSED" if self.passed else f"FAILED ({len(self.violations)} violations)"
        return (
            f"Communication audit {verdict}: {self.n_messages} data messages, "
            f"{self.n_collectives_init} collectives during init, "
            f"{self.n_collectives_run} while stepping"
        )


def _base_kind(kind: str) -> str:
    return kind.removesuffix("_sm")


def _mortar_pairs(mesh: Mesh, owner: np.ndarray, iface_id: int, n_delta: int) -> Counter:
    """Replica -> primary mortar counts per rank pair at the given topology."""
    iface = mesh.interfaces[iface_id]
    n_faces = iface.n_faces_par
    pairs: Counter = Counter()
    for i_par in range(n_faces):
        primary = int(owner[iface.static_elements[i_par]])
        for i_sub in (0, 1):
            replica = int(owner[iface.moving_elements[moving_index(i_par, n_delta, i_sub, n_faces)]])
            if replica != primary:
                pairs[(replica, primary)] += 1
    return pairs


def _conforming_pairs(mesh: Mesh, owner: np.ndarray) -> Counter:
    """Replica -> primary conforming face counts per rank pair."""
    minus = owner[mesh.faces.minus_elem]
    plus = owner[mesh.faces.plus_elem]
    cut = minus != plus
    return Counter(zip(plus[cut].tolist(), minus[cut].tolist()))


def audit_communication(
    trace: pd.DataFrame, mesh: Mesh, assignment: RankAssignment, degree: int
) -> AuditReport:
    """
    Verify a run's message trace.

    Checks that no collective happened after initialization, that every
    message carries exactly the face or mortar data its kind implies, and
    that its sender, receiver and item count agree with the rank maps at the
    topology the message was sent for.

    Args:
        trace (pd.DataFrame): Concatenated traces of all ranks (TRACE_COLUMNS).
        mesh (Mesh): Mesh of the run.
        assignment (RankAssignment): Element ownership of the run.
        degree (int): Polynomial degree N.

    Returns:
        AuditReport: Counts and the list of violations, empty when passed.
    """
    report = AuditReport()
    if trace.empty:
        return report
    owner = assignment.owner
    conforming = _conforming_pairs(mesh, owner)
    mortar_cache: dict[tuple[int, int], Counter] = {}

    collectives = trace[trace["kind"].isin(COLLECTIVE_KINDS)]
    report.n_collectives_init = int((collectives["phase"] == Phase.INIT.value).sum())
    report.n_collectives_run = int((collectives["phase"] == Phase.RUN.value).sum())
    for row in collectives[collectives["phase"] == Phase.RUN.value].itertuples(index=False):
        report.violations.append(
            f"Collective {row.kind} by rank {row.src} at step {row.step}, stage {row.stage}"
        )

    data = trace[~trace["kind"].isin(COLLECTIVE_KINDS)]
    report.n_messages = len(data)
    for row in data.itertuples(index=False):
        base = _base_kind(row.kind)
        if base not in KIND_VALUES:
            report.violations.append(f"Unknown message kind {row.kind} from rank {row.src}")
            continue
        expected_values = (degree + 1) * KIND_VALUES[base]
        if row.item_values != expected_values or row.bytes != row.items * row.item_values * ITEMSIZE:
            report.violations.append(
                f"{row.kind} message {row.src}->{row.dst} at step {row.step} carries {row.bytes} bytes "
                f"for {row.items} items of {row.item_values} values, expected {expected_values} values per item"
            )
        if row.kind.endswith("_sm"):
            key = (int(row.interface), int(row.n_delta))
            if key not in mortar_cache:
                mortar_cache[key] = _mortar_pairs(mesh, owner, *key)
            allowed = mortar_cache[key]
        else:
            allowed = conforming
        pair = (row.src, row.dst) if base in REPLICA_KINDS else (row.dst, row.src)
        if allowed.get(pair, 0) != row.items:
            report.violations.append(
                f"{row.kind} message {row.src}->{row.dst} (interface {row.interface}, n_delta {row.n_delta}) "
                f"has {row.items} items, rank maps allow {allowed.get(pair, 0)}"
            )

    # every rank pair the maps require must appear exactly once per exchange
    for (step, stage, kind, iface), group in data.groupby(["step", "stage", "kind", "interface"]):
        base = _base_kind(kind)
        if base not in KIND_VALUES:
            continue
        if kind.endswith("_sm"):
            n_deltas = group["n_delta"].unique()
            if n_deltas.size != 1:
                report.violations.append(
                    f"{kind} messages of interface {iface} at step {step}, stage {stage} "
                    f"mix topologies {sorted(n_deltas.tolist())}"
                )
                continue
            allowed = mortar_cache[(int(iface), int(n_deltas[0]))]
        else:
            allowed = conforming
        sent = Counter(
            (s, d) if base in REPLICA_KINDS else (d, s) for s, d in zip(group["src"], group["dst"])
        )
        if set(sent) != set(allowed) or any(n > 1 for n in sent.values()):
            report.violations.append(
                f"{kind} exchange of interface {iface} at step {step}, stage {stage}: "
                f"pairs {sorted(sent)} differ from required {sorted(allowed)}"
            )
    return report
