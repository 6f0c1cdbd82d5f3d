from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from slidingdg.errors import ProtocolError, TransportError
from slidingdg.parallel import (
    TRACE_COLUMNS,
    Descriptor,
    InProcessNetwork,
    MessageSchedule,
    Phase,
    exchange_mortar_data,
    trace_frame,
)


def test_messages_arrive_in_order_whatever_the_wait_order():
    network = InProcessNetwork(2)
    sender, receiver = network.endpoint(0), network.endpoint(1)
    first = receiver.irecv(0, (2, 3), "U")
    second = receiver.irecv(0, (1,), "F")
    sender.isend(1, np.arange(6.0).reshape(2, 3), "U")
    sender.isend(1, np.array([9.0]), "F")
    np.testing.assert_array_equal(second.wait(), [9.0])
    np.testing.assert_array_equal(first.wait(), np.arange(6.0).reshape(2, 3))
    assert first.test()


def test_receive_of_wrong_size_is_a_protocol_error():
    network = InProcessNetwork(2)
    network.endpoint(0).isend(1, np.zeros(4), "U")
    request = network.endpoint(1).irecv(0, (5,), "U")
    with pytest.raises(ProtocolError, match="expected 40 bytes of U from rank 0, got 32"):
        request.wait()


def test_unknown_peer():
    endpoint = InProcessNetwork(2).endpoint(0)
    with pytest.raises(ProtocolError, match="no channel"):
        endpoint.isend(0, np.zeros(1), "U")
    with pytest.raises(ProtocolError):
        endpoint.irecv(5, (1,), "U")


def test_allgather_across_threads():
    network = InProcessNetwork(3, trace=True)
    endpoints = [network.endpoint(rank) for rank in range(3)]
    with ThreadPoolExecutor(max_workers=3) as pool:
        gathered = list(pool.map(lambda e: e.allgather({"rank": e.rank}), endpoints))
    assert gathered == [[{"rank": 0}, {"rank": 1}, {"rank": 2}]] * 3
    records = endpoints[1].trace.records
    assert [(r.kind, r.phase, r.dst) for r in records] == [("allgather", Phase.INIT.value, -1)]


def test_abort_unblocks_a_waiting_rank():
    network = InProcessNetwork(2)
    endpoint = network.endpoint(1)
    endpoint.timeout = 5.0
    request = endpoint.irecv(0, (1,), "U")
    network.endpoint(0).abort()
    with pytest.raises(TransportError, match="aborted"):
        request.wait()


def test_timeout_without_sender():
    endpoint = InProcessNetwork(2).endpoint(1)
    endpoint.timeout = 0.1
    with pytest.raises(TransportError, match="timed out"):
        endpoint.irecv(0, (1,), "U").wait()


def test_trace_records_run_phase_messages():
    network = InProcessNetwork(2, trace=True)
    endpoint = network.endpoint(0)
    endpoint.enter_run_phase()
    endpoint.trace.set_context(3, 2)
    endpoint.isend(1, np.zeros((5, 4, 4)), "U_sm", interface=1, n_delta=2)
    frame = trace_frame(endpoint.trace.records)
    assert list(frame.columns) == TRACE_COLUMNS
    row = frame.iloc[0]
    assert (row.step, row.stage, row.src, row.dst, row.phase) == (3, 2, 0, 1, "run")
    assert (row.items, row.item_values, row.bytes) == (5, 16, 5 * 16 * 8)
    assert (row.interface, row.n_delta) == (1, 2)


def test_trace_is_off_by_default():
    endpoint = InProcessNetwork(2).endpoint(0)
    endpoint.isend(1, np.zeros(3), "U")
    assert endpoint.trace.records == []
    assert trace_frame([]).empty


def test_exchange_copies_local_runs_and_receives_remote_ones():
    network = InProcessNetwork(2)
    a, b = network.endpoint(0), network.endpoint(1)
    out_a = np.arange(8.0).reshape(4, 2)
    in_a = np.zeros((4, 2))
    schedule_a = MessageSchedule(
        rank=0,
        messages=(Descriptor(iface=0, partner=1, offset=2, count=2),),
        local=(Descriptor(iface=0, partner=0, offset=0, count=2),),
    )
    schedule_b = MessageSchedule(rank=1, messages=(Descriptor(iface=0, partner=0, offset=0, count=2),))
    out_b = -np.arange(4.0).reshape(2, 2)
    in_b = np.zeros((2, 2))
    pending_a = exchange_mortar_data(a, schedule_a, out_a, schedule_a, in_a, "U_sm")
    pending_b = exchange_mortar_data(b, schedule_b, out_b, schedule_b, in_b, "U_sm")
    pending_a.wait()
    pending_b.wait()
    np.testing.assert_array_equal(in_a[:2], out_a[:2])
    np.testing.assert_array_equal(in_a[2:], out_b)
    np.testing.assert_array_equal(in_b, out_a[2:])
    assert pending_a.test()


def test_exchange_rejects_mismatched_local_runs():
    endpoint = InProcessNetwork(1).endpoint(0)
    out_schedule = MessageSchedule(rank=0, local=(Descriptor(iface=0, partner=0, offset=0, count=2),))
    in_schedule = MessageSchedule(rank=0, local=(Descriptor(iface=0, partner=0, offset=0, count=3),))
    with pytest.raises(ProtocolError, match="sends 2 items but expects 3"):
        exchange_mortar_data(endpoint, out_schedule, np.zeros((2, 1)), in_schedule, np.zeros((3, 1)), "F_sm")
