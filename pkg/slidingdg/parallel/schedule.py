"""Contiguous, metadata-free message schedules and the non-blocking face exchange."""

from dataclasses import dataclass, field

import numpy as np

from slidingdg.errors import ProtocolError
from slidingdg.parallel.transport import Endpoint, RecvRequest

CONFORMING = -1


@dataclass(frozen=True)
class Descriptor:
    """One message: items [offset, offset + count) of a sorted array, to or from partner."""

    iface: int
    partner: int
    offset: int
    count: int
    n_delta: int = -1


@dataclass(frozen=True)
class MessageSchedule:
    """
    Messages of one role in posting order, plus the runs that stay on this rank.

    Attributes:
        rank (int): Rank the schedule belongs to.
        messages (tuple[Descriptor, ...]): Remote runs, ordered by (iface, partner).
        local (tuple[Descriptor, ...]): Runs whose partner is this rank.
    """

    rank: int
    messages: tuple[Descriptor, ...] = ()
    local: tuple[Descriptor, ...] = ()

    @property
    def partners(self) -> set[int]:
        return {d.partner for d in self.messages}

    def items_to(self, partner: int) -> int:
        return sum(d.count for d in self.messages if d.partner == partner)


def build_schedule(
    index_array: np.ndarray, rank: int, n_delta: dict[int, int] | None = None
) -> MessageSchedule:
    """
    Cut a sorted index array into one descriptor per (interface, partner) run.

    Args:
        index_array (np.ndarray): Sorted array with at least "iface" and "partner" fields.
        rank (int): Owning rank; runs with partner == rank become local copies.
        n_delta (dict[int, int] | None): Topology each interface's arrays were built for.

    Returns:
        MessageSchedule: Descriptors in array order.
    """
    n_delta = n_delta or {}
    messages, local = [], []
    if index_array.size:
        keys = np.stack([index_array["iface"], index_array["partner"]], axis=1)
        starts = np.flatnonzero(np.any(keys[1:] != keys[:-1], axis=1)) + 1
        bounds = np.concatenate([[0], starts, [index_array.size]])
        for start, stop in zip(bounds[:-1], bounds[1:]):
            iface, partner = (int(v) for v in keys[start])
            descriptor = Descriptor(
                iface=iface,
                partner=partner,
                offset=int(start),
                count=int(stop - start),
                n_delta=n_delta.get(iface, -1),
            )
            (local if partner == rank else messages).append(descriptor)
    return MessageSchedule(rank=rank, messages=tuple(messages), local=tuple(local))


@dataclass
class PendingExchange:
    """Receives still in flight; wait() lands each payload in its slice of the target array."""

    target: np.ndarray
    requests: list[tuple[RecvRequest, int, int]] = field(default_factory=list)

    def test(self) -> bool:
        return all(request.test() for request, _, _ in self.requests)

    def wait(self) -> np.ndarray:
        for request, offset, count in self.requests:
            self.target[offset : offset + count] = request.wait()
        self.requests.clear()
        return self.target


def exchange_mortar_data(
    endpoint: Endpoint,
    schedule_out: MessageSchedule,
    data_out: np.ndarray,
    schedule_in: MessageSchedule,
    data_in: np.ndarray,
    kind: str,
) -> PendingExchange:
    """
    Post all sends and receives of one exchange phase without waiting.

    Sends carry contiguous slices of data_out; receives land in contiguous
    slices of data_in. Runs between a rank and itself are copied directly.

    Args:
        endpoint (Endpoint): This rank's transport endpoint.
        schedule_out (MessageSchedule): Runs this rank sends.
        data_out (np.ndarray): Sorted outgoing data, items along axis 0.
        schedule_in (MessageSchedule): Runs this rank receives.
        data_in (np.ndarray): Sorted receive array, items along axis 0.
        kind (str): Message kind for the trace.

    Returns:
        PendingExchange: Handle to complete the receives.
    """
    for d in schedule_out.messages:
        endpoint.isend(
            d.partner,
            data_out[d.offset : d.offset + d.count],
            kind,
            interface=d.iface,
            n_delta=d.n_delta,
        )
    pending = PendingExchange(target=data_in)
    for d in schedule_in.messages:
        request = endpoint.irecv(d.partner, (d.count,) + data_in.shape[1:], kind)
        pending.requests.append((request, d.offset, d.count))

    outgoing = {d.iface: d for d in schedule_out.local}
    incoming = {d.iface: d for d in schedule_in.local}
    if outgoing.keys() != incoming.keys():
        raise ProtocolError(
            f"Rank {endpoint.rank}: local {kind} runs disagree, "
            f"sending {sorted(outgoing)} but receiving {sorted(incoming)}"
        )
    for iface, src in outgoing.items():
        dst = incoming[iface]
        if src.count != dst.count:
            raise ProtocolError(
                f"Rank {endpoint.rank}: local {kind} run of interface {iface} "
                f"sends {src.count} items but expects {dst.count}"
            )
        data_in[dst.offset : dst.offset + dst.count] = data_out[src.offset : src.offset + src.count]
    return pending
