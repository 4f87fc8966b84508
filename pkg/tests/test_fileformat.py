import struct

import pytest

from kih import fileformat as ff
from kih.cprf import constrain
from kih.entropy import Entropy
from kih.errors import FormatError
from kih.ue import Ciphertext, EpochKey, UpdateToken, random_message, ue_enc, ue_next, ue_setup, ue_upd


def test_instance_round_trip(toy_inst):
    back = ff.load_instance(ff.dump_instance(toy_inst))
    assert back.params == toy_inst.params
    assert back.A0 == toy_inst.A0 and back.A1 == toy_inst.A1
    assert back.instance_id == toy_inst.instance_id


def test_seed_round_trip(toy_inst, golden_seeds):
    params, seed = ff.load_seed(ff.dump_seed(toy_inst.params, golden_seeds[0]))
    assert params == toy_inst.params and seed == golden_seeds[0]


def test_instance_and_seed_not_confused(toy_inst, golden_seeds):
    with pytest.raises(FormatError):
        ff.load_seed(ff.dump_instance(toy_inst))
    with pytest.raises(FormatError):
        ff.load_instance(ff.dump_seed(toy_inst.params, golden_seeds[0]))


def test_constrained_round_trip(toy_inst, golden_seeds):
    ck = constrain(toy_inst, golden_seeds[0], "10", "right", "zeros")
    assert ff.load_constrained(ff.dump_constrained(ck)) == ck


def _ue_objects(inst):
    e = Entropy(b"ff")
    ki = ue_setup(inst, e)
    c = ue_enc(inst, ki, random_message(inst, e), "10")
    new, tok = ue_next(inst, ki, e)
    return ki, tok, ue_upd(inst, tok, c)


def test_ue_round_trips(toy_inst):
    ki, tok, c = _ue_objects(toy_inst)
    k2 = ff.load_ue(ff.dump_ue(ki), EpochKey)
    assert (k2.epoch, k2.k, k2.nonce) == (ki.epoch, ki.k, ki.nonce)
    t2 = ff.load_ue(ff.dump_ue(tok), UpdateToken)
    assert (t2.epoch, t2.dk, t2.dN) == (tok.epoch, tok.dk, tok.dN)
    c2 = ff.load_ue(ff.dump_ue(c), Ciphertext)
    assert (c2.epoch, c2.data_id, c2.body, c2.t) == (c.epoch, c.data_id, c.body, c.t)


def test_token_is_not_a_key(toy_inst):
    ki, tok, _ = _ue_objects(toy_inst)
    with pytest.raises(FormatError):
        ff.load_ue(ff.dump_ue(tok), EpochKey)
    with pytest.raises(FormatError):
        ff.load_ue(ff.dump_ue(ki), UpdateToken)


@pytest.mark.parametrize("mutate", [
    lambda b: b"XXXX" + b[4:],
    lambda b: b[:4] + struct.pack("<I", 9) + b[8:],
    lambda b: b[:8] + struct.pack("<I", 7) + b[12:],
    lambda b: b[:-3],
    lambda b: b + b"\x00",
    lambda b: b"",
])
def test_corrupt_files_rejected(toy_inst, mutate):
    _, tok, _ = _ue_objects(toy_inst)
    for blob, loader in ((ff.dump_instance(toy_inst), ff.load_instance), (ff.dump_ue(tok), ff.load_ue)):
        with pytest.raises(FormatError):
            loader(mutate(blob))


def test_bad_params_in_file(toy_inst):
    raw = bytearray(ff.dump_instance(toy_inst))
    raw[12:20] = struct.pack("<Q", 0)  # n = 0
    with pytest.raises(FormatError):
        ff.load_instance(bytes(raw))


def test_missing_file(tmp_path):
    with pytest.raises(FormatError):
        ff.read(tmp_path / "absent.kih")
