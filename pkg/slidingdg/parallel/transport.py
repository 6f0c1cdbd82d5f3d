"""Point-to-point message transport between ranks.

Payloads are raw float64 bytes; a receiver learns the message shape from its
own bookkeeping, never from the message. Messages on one (src, dst) channel
are delivered in order, and the k-th receive posted for a source is bound to
the k-th message that source sent, whatever order requests are waited in.
"""

import os
import pickle
import queue
import threading
import time
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any

import numpy as np
import pandas as pd

from slidingdg.errors import ProtocolError, TransportError
from slidingdg.logger import get_logger

logger = get_logger(__name__)

TRANSPORT_TIMEOUT = float(os.getenv("SLIDINGDG_TRANSPORT_TIMEOUT", "300"))
POLL_INTERVAL = 0.05
ITEMSIZE = np.dtype(np.float64).itemsize
COLLECTIVE_KINDS = frozenset({"allgather"})

TRACE_COLUMNS = [
    "step",
    "stage",
    "src",
    "dst",
    "bytes",
    "kind",
    "phase",
    "interface",
    "n_delta",
    "items",
    "item_values",
]


class Phase(str, Enum):
    INIT = "init"
    RUN = "run"


@dataclass(frozen=True)
class MessageRecord:
    step: int
    stage: int
    src: int
    dst: int
    bytes: int
    kind: str
    phase: str
    interface: int = -1
    n_delta: int = -1
    items: int = 0
    item_values: int = 0


class TraceRecorder:
    """Collects one record per sent message (and per collective call)."""

    def __init__(self, enabled: bool = True):
        self.enabled = enabled
        self.records: list[MessageRecord] = []
        self.step = -1
        self.stage = -1

    def set_context(self, step: int, stage: int) -> None:
        self.step = step
        self.stage = stage

    def record(self, **fields: Any) -> None:
        if self.enabled:
            self.records.append(MessageRecord(step=self.step, stage=self.stage, **fields))


def trace_frame(records: list[MessageRecord]) -> pd.DataFrame:
    """Trace records as a DataFrame with the documented column order."""
    return pd.DataFrame([asdict(record) for record in records], columns=TRACE_COLUMNS)


class Request(ABC):
    @abstractmethod
    def test(self) -> bool:
        """Return True once the operation has completed, without blocking."""

    @abstractmethod
    def wait(self) -> np.ndarray | None:
        """Block until completion; receives return the payload array."""


class SendRequest(Request):
    """Sends are handed to a buffered channel and complete on posting."""

    def test(self) -> bool:
        return True

    def wait(self) -> None:
        return None


class RecvRequest(Request):
    def __init__(self, endpoint: "Endpoint", src: int, seq: int, shape: tuple[int, ...], kind: str):
        self._endpoint = endpoint
        self.src = src
        self.seq = seq
        self.shape = shape
        self.kind = kind
        self._result: np.ndarray | None = None

    def test(self) -> bool:
        if self._result is not None:
            return True
        self._endpoint._drain(self.src, block=False)
        return self.seq in self._endpoint._buffers[self.src]

    def wait(self) -> np.ndarray:
        if self._result is None:
            payload = self._endpoint._take(self.src, self.seq)
            expected = int(np.prod(self.shape, dtype=np.int64)) * ITEMSIZE
            if len(payload) != expected:
                raise ProtocolError(
                    f"Rank {self._endpoint.rank} expected {expected} bytes of {self.kind} "
                    f"from rank {self.src}, got {len(payload)}"
                )
            self._result = np.frombuffer(payload, dtype=np.float64).reshape(self.shape)
        return self._result


class Endpoint(ABC):
    """
    One rank's view of the transport.

    Subclasses provide _post (hand bytes to a peer) and per-source inbound
    queues; ordering, request binding, phases and tracing live here.
    """

    def __init__(
        self,
        rank: int,
        size: int,
        inboxes: dict[int, "queue.Queue[bytes]"],
        abort_event: Any | None = None,
        trace: bool = False,
        timeout: float = TRANSPORT_TIMEOUT,
    ):
        self.rank = rank
        self.size = size
        self.phase = Phase.INIT
        self.trace = TraceRecorder(enabled=trace)
        self.timeout = timeout
        self._abort = abort_event
        self._inboxes = inboxes
        self._buffers: dict[int, dict[int, bytes]] = {src: {} for src in inboxes}
        self._delivered = {src: 0 for src in inboxes}
        self._posted = {src: 0 for src in inboxes}

    @abstractmethod
    def _post(self, dst: int, payload: bytes) -> None:
        """Hand a payload to the channel towards dst."""

    def close(self) -> None:
        """Release backend resources."""

    def enter_run_phase(self) -> None:
        self.phase = Phase.RUN

    def abort(self) -> None:
        if self._abort is not None:
            self._abort.set()

    def _check_peer(self, peer: int) -> None:
        if peer not in self._inboxes:
            raise ProtocolError(f"Rank {self.rank} has no channel to rank {peer}")

    def _drain(self, src: int, block: bool) -> None:
        inbox = self._inboxes[src]
        if not block:
            while True:
                try:
                    payload = inbox.get_nowait()
                except queue.Empty:
                    return
                self._store(src, payload)
        start = time.monotonic()
        while True:
            try:
                payload = inbox.get(timeout=POLL_INTERVAL)
            except queue.Empty:
                if self._abort is not None and self._abort.is_set():
                    raise TransportError(f"Rank {self.rank}: a peer rank aborted") from None
                if time.monotonic() - start > self.timeout:
                    raise TransportError(
                        f"Rank {self.rank} timed out after {self.timeout}s waiting for rank {src}"
                    ) from None
                continue
            self._store(src, payload)
            return

    def _store(self, src: int, payload: bytes) -> None:
        self._buffers[src][self._delivered[src]] = payload
        self._delivered[src] += 1

    def _take(self, src: int, seq: int) -> bytes:
        while seq not in self._buffers[src]:
            self._drain(src, block=True)
        return self._buffers[src].pop(seq)

    def isend(
        self,
        dst: int,
        array: np.ndarray,
        kind: str,
        interface: int = -1,
        n_delta: int = -1,
    ) -> SendRequest:
        """
        Start sending a float64 array to dst.

        Args:
            dst (int): Destination rank.
            array (np.ndarray): Data, items along axis 0.
            kind (str): Message kind for the trace (U, F, W, Q, U_sm, ...).
            interface (int): Sliding interface id, -1 for conforming faces.
            n_delta (int): Interface topology the message belongs to.

        Returns:
            SendRequest: Completed request.
        """
        self._check_peer(dst)
        data = np.ascontiguousarray(array, dtype=np.float64)
        items = int(data.shape[0]) if data.ndim else 1
        item_values = int(data.size // items) if items else 0
        self.trace.record(
            src=self.rank,
            dst=dst,
            bytes=data.nbytes,
            kind=kind,
            phase=self.phase.value,
            interface=interface,
            n_delta=n_delta,
            items=items,
            item_values=item_values,
        )
        self._post(dst, data.tobytes())
        return SendRequest()

    def irecv(self, src: int, shape: tuple[int, ...], kind: str) -> RecvRequest:
        """
        Post a receive of a float64 array of known shape from src.

        Args:
            src (int): Source rank.
            shape (tuple[int, ...]): Expected array shape.
            kind (str): Message kind, used in error messages.

        Returns:
            RecvRequest: Request bound to the next message from src.
        """
        self._check_peer(src)
        seq = self._posted[src]
        self._posted[src] += 1
        return RecvRequest(self, src, seq, tuple(int(n) for n in shape), kind)

    def allgather(self, obj: Any, kind: str = "allgather") -> list[Any]:
        """
        Collective: every rank contributes obj and receives all contributions.

        Only meant for the initialization phase; the call is traced so audits
        can prove no collective happens while stepping.
        """
        payload = pickle.dumps(obj)
        self.trace.record(
            src=self.rank, dst=-1, bytes=len(payload), kind=kind, phase=self.phase.value
        )
        for peer in range(self.size):
            if peer != self.rank:
                self._post(peer, payload)
        gathered: list[Any] = []
        for peer in range(self.size):
            if peer == self.rank:
                gathered.append(obj)
                continue
            seq = self._posted[peer]
            self._posted[peer] += 1
            gathered.append(pickle.loads(self._take(peer, seq)))
        return gathered


class InProcessEndpoint(Endpoint):
    def __init__(self, rank: int, size: int, channels: dict[tuple[int, int], queue.Queue], **kwargs: Any):
        inboxes = {src: channels[(src, rank)] for src in range(size) if src != rank}
        super().__init__(rank, size, inboxes, **kwargs)
        self._outboxes = {dst: channels[(rank, dst)] for dst in range(size) if dst != rank}

    def _post(self, dst: int, payload: bytes) -> None:
        self._outboxes[dst].put(payload)


class InProcessNetwork:
    """Ranks as threads of one process, connected by unbounded FIFO queues."""

    def __init__(self, size: int, trace: bool = False):
        self.size = size
        self.trace = trace
        self.abort_event = threading.Event()
        self.channels = {
            (src, dst): queue.Queue() for src in range(size) for dst in range(size) if src != dst
        }

    def endpoint(self, rank: int) -> InProcessEndpoint:
        return InProcessEndpoint(
            rank, self.size, self.channels, abort_event=self.abort_event, trace=self.trace
        )


class ProcessEndpoint(Endpoint):
    """
    Endpoint of a worker process, one duplex pipe per peer.

    A receiver thread per peer moves incoming bytes into the inbound queue and
    a sender thread per peer drains the outbound queue, so posting a send never
    blocks on a full pipe.
    """

    def __init__(self, rank: int, size: int, connections: dict[int, Any], **kwargs: Any):
        inboxes = {peer: queue.Queue() for peer in connections}
        super().__init__(rank, size, inboxes, **kwargs)
        self._connections = connections
        self._outboxes: dict[int, queue.Queue] = {peer: queue.Queue() for peer in connections}
        self._threads: list[threading.Thread] = []
        for peer, conn in connections.items():
            receiver = threading.Thread(
                target=self._receive_loop, args=(peer, conn), daemon=True, name=f"recv-{rank}-{peer}"
            )
            sender = threading.Thread(
                target=self._send_loop, args=(peer, conn), daemon=True, name=f"send-{rank}-{peer}"
            )
            receiver.start()
            sender.start()
            self._threads.append(sender)

    def _receive_loop(self, peer: int, conn: Any) -> None:
        inbox = self._inboxes[peer]
        while True:
            try:
                inbox.put(conn.recv_bytes())
            except (EOFError, OSError):
                return

    def _send_loop(self, peer: int, conn: Any) -> None:
        outbox = self._outboxes[peer]
        while True:
            payload = outbox.get()
            if payload is None:
                return
            try:
                conn.send_bytes(payload)
            except (BrokenPipeError, OSError) as e:
                logger.error(f"Rank {self.rank} lost the pipe to rank {peer}: {e}")
                self.abort()
                return

    def _post(self, dst: int, payload: bytes) -> None:
        self._outboxes[dst].put(payload)

    def close(self) -> None:
        for outbox in self._outboxes.values():
            outbox.put(None)
        for thread in self._threads:
            thread.join(timeout=self.timeout)


def process_connections(size: int, context: Any) -> list[dict[int, Any]]:
    """Duplex pipes for every rank pair, grouped per rank as {peer: connection}."""
    connections: list[dict[int, Any]] = [{} for _ in range(size)]
    for a in range(size):
        for b in range(a + 1, size):
            end_a, end_b = context.Pipe(duplex=True)
            connections[a][b] = end_a
            connections[b][a] = end_b
    return connections
