import numpy as np
import pytest

from risecure.extractor import enroll, get_code
from risecure.hashing import bits_to_bytes, bytes_to_bits, compose_response
from risecure.isa import (CUSTOM_OPCODE, F3_INNER_INIT, F3_OUTER_CHAL,
                          IllegalInstruction, MachineState, PufDevice, asm_add,
                          asm_addi, asm_beq, asm_ebreak, asm_i,
                          asm_inner_puf_init, asm_jal, asm_lui, asm_lw,
                          asm_outer_puf_chal, asm_r, asm_sw, decode,
                          encode_fields, li32, run, step)
from risecure.prng import derive_seed
from risecure.puf import SramPuf


# --- decoding -------------------------------------------------------------

def test_fixed_custom_instruction_vectors():
    i = decode(0x0002952B)
    assert (i.name, i.rd, i.rs1, i.rs2) == ("inner_puf_init", 10, 5, 0)
    assert i.funct3 == F3_INNER_INIT and i.opcode == CUSTOM_OPCODE
    assert encode_fields(i) == 0x0002952B

    o = decode(0x0062A52B)
    assert (o.name, o.rd, o.rs1, o.rs2) == ("outer_puf_chal", 10, 5, 6)
    assert o.funct3 == F3_OUTER_CHAL
    assert encode_fields(o) == 0x0062A52B


def test_custom_word_roundtrip_randomized():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        rd = int(rng.integers(0, 32))
        rs1 = int(rng.integers(0, 32))
        if rng.integers(0, 2):
            word = asm_inner_puf_init(rd, rs1)
            i = decode(word)
            assert (i.name, i.rd, i.rs1, i.rs2) == ("inner_puf_init", rd, rs1, 0)
        else:
            rs2 = int(rng.integers(0, 32))
            word = asm_outer_puf_chal(rd, rs1, rs2)
            i = decode(word)
            assert (i.name, i.rd, i.rs1, i.rs2) == ("outer_puf_chal", rd, rs1, rs2)
        assert encode_fields(i) == word


def test_reserved_custom_encodings_rejected():
    base = asm_inner_puf_init(1, 2)
    with pytest.raises(IllegalInstruction):
        decode(base | (1 << 25))  # funct7 must be zero
    with pytest.raises(IllegalInstruction):
        decode(base | (3 << 20))  # inner init with rs2 != 0
    for f3 in (0, 3, 4, 5, 6, 7):
        with pytest.raises(IllegalInstruction):
            decode(asm_r(CUSTOM_OPCODE, f3, 0, 1, 2, 0))


def test_known_base_isa_words():
    # canonical encodings, written down independently of the asm helpers
    assert decode(0x00500093).name == "addi"      # addi x1, x0, 5
    assert decode(0x00500093).imm == 5 and decode(0x00500093).rd == 1
    assert decode(0x002081B3).name == "add"       # add x3, x1, x2
    assert decode(0x123452B7).name == "lui"       # lui x5, 0x12345
    assert decode(0x123452B7).imm == 0x12345000
    assert decode(0x00100073).name == "ebreak"
    assert decode(0xFFF00E13).imm == -1           # addi x28, x0, -1


def test_malformed_base_words_rejected():
    for word in (
        0xFFFFFFFF,
        0x00000073,            # ecall unsupported, only ebreak
        0x00001067,            # jalr with funct3 != 0
        0x00003003,            # load funct3=011
        0x00003023,            # store funct3=011
        0x00002063 | (2 << 12),  # branch funct3=010
        asm_r(0b0110011, 0b000, 0b0000001, 1, 2, 3),  # mul (M ext absent)
        asm_i(0b0010011, 0b001, 1, 2, (1 << 10) | 3) | (1 << 30),  # bad slli
    ):
        with pytest.raises(IllegalInstruction):
            decode(word)


# --- base machine semantics ----------------------------------------------

def _run_words(words, regs=None, mem=4096):
    st = MachineState(memory_size=mem)
    for r, v in (regs or {}).items():
        st.regs[r] = v & 0xFFFFFFFF
    st.load_words(0, list(words) + [asm_ebreak()])
    run(st, max_steps=10000)
    return st


def test_alu_against_python_oracle():
    rng = np.random.default_rng(1)
    ops = [("add", lambda a, b: a + b), ("sub", lambda a, b: a - b),
           ("xor", lambda a, b: a ^ b), ("or", lambda a, b: a | b),
           ("and", lambda a, b: a & b),
           ("sll", lambda a, b: a << (b & 31)),
           ("srl", lambda a, b: a >> (b & 31)),
           ("sra", lambda a, b: (a - ((a & 0x80000000) << 1)) >> (b & 31)),
           ("slt", lambda a, b: int((a ^ 0x80000000) < (b ^ 0x80000000))),
           ("sltu", lambda a, b: int(a < b))]
    encodings = {"add": (0, 0), "sub": (0, 32), "sll": (1, 0), "slt": (2, 0),
                 "sltu": (3, 0), "xor": (4, 0), "srl": (5, 0), "sra": (5, 32),
                 "or": (6, 0), "and": (7, 0)}
    for name, fn in ops:
        f3, f7 = encodings[name]
        for _ in range(40):
            a = int(rng.integers(0, 1 << 32))
            b = int(rng.integers(0, 1 << 32))
            st = _run_words([asm_r(0b0110011, f3, f7, 3, 1, 2)], {1: a, 2: b})
            assert st.regs[3] == fn(a, b) & 0xFFFFFFFF, name


def test_immediate_ops_and_sign_extension():
    st = _run_words([asm_addi(1, 0, -7)])
    assert st.regs[1] == 0xFFFFFFF9
    st = _run_words([asm_i(0b0010011, 0b011, 2, 1, -1)], {1: 5})  # sltiu, imm -1 = max u32
    assert st.regs[2] == 1
    st = _run_words([asm_i(0b0010011, 0b010, 2, 1, 3)], {1: 0xFFFFFFFE})  # slti: -2 < 3
    assert st.regs[2] == 1
    st = _run_words([asm_i(0b0010011, 0b101, 2, 1, 4 | (0b0100000 << 5))], {1: 0x80000000})
    assert st.regs[2] == 0xF8000000  # srai


def test_x0_is_hardwired_zero():
    st = _run_words([asm_addi(0, 0, 55), asm_add(1, 0, 0)])
    assert st.regs[0] == 0 and st.regs[1] == 0


def test_lui_auipc_jal_link_values():
    st = MachineState(memory_size=4096)
    st.load_words(0, [asm_lui(1, 0x12345),
                      asm_i(0b0010111, 0, 2, 0, 0) | (1 << 12),  # auipc x2, 0x1
                      asm_jal(3, 8),
                      asm_addi(4, 0, 99),  # skipped
                      asm_ebreak()])
    run(st)
    assert st.regs[1] == 0x12345000
    assert st.regs[2] == 4 + 0x1000
    assert st.regs[3] == 12  # link = pc + 4 of the jal at 8
    assert st.regs[4] == 0


def test_branch_loop_with_backward_jump():
    st = MachineState(memory_size=4096)
    st.load_words(0, [asm_addi(1, 0, 5),
                      asm_addi(1, 1, -1),     # 0x04
                      asm_beq(1, 0, 8),       # 0x08 -> 0x10 when x1 == 0
                      asm_jal(0, -8),         # 0x0c -> 0x04
                      asm_ebreak()])          # 0x10
    assert run(st) == "halted"
    assert st.regs[1] == 0 and st.pc == 0x10


def test_jalr_clears_low_bit_and_traps_when_misaligned():
    st = MachineState(memory_size=4096)
    st.regs[1] = 0x101
    st.load_words(0, [asm_i(0b1100111, 0, 2, 1, 0)])  # jalr x2, 0(x1)
    st.load_words(0x100, [asm_ebreak()])
    assert run(st) == "halted"
    assert st.regs[2] == 4 and st.pc == 0x100

    st = MachineState(memory_size=4096)
    st.regs[1] = 0x102
    st.load_words(0, [asm_i(0b1100111, 0, 2, 1, 0)])
    assert step(st) == "trap"
    assert "misaligned" in st.trap_cause and st.pc == 0


def test_memory_ops_widths_and_sign():
    st = _run_words([
        asm_addi(1, 0, 0x7A2),             # scratch base
        *li32(2, 0xDEADBEEF),
        asm_sw(1, 2, 0),
        asm_lw(3, 1, 0),
        asm_i(0b0000011, 0b000, 4, 1, 0),  # lb  -> sign extend 0xEF
        asm_i(0b0000011, 0b100, 5, 1, 0),  # lbu
        asm_i(0b0000011, 0b001, 6, 1, 0),  # lh  -> sign extend 0xBEEF
        asm_i(0b0000011, 0b101, 7, 1, 0),  # lhu
        asm_r(0b0100011, 0b000, 0, 0, 1, 2) | (4 << 7),  # sb x2 -> +4
        asm_i(0b0000011, 0b100, 8, 1, 4),
    ])
    assert st.regs[3] == 0xDEADBEEF
    assert st.regs[4] == 0xFFFFFFEF and st.regs[5] == 0xEF
    assert st.regs[6] == 0xFFFFBEEF and st.regs[7] == 0xBEEF
    assert st.regs[8] == 0xEF


def test_traps_preserve_pc_and_stop_the_machine():
    st = MachineState(memory_size=4096)
    st.load_words(0, [*li32(1, 4094), asm_lw(2, 1, 0)])  # crosses end of memory
    assert run(st) == "trap"
    assert st.pc == 8 and "out of bounds" in st.trap_cause

    st = MachineState(memory_size=4096)
    st.load_words(0, [0xFFFFFFFF])
    assert run(st) == "trap" and st.pc == 0

    st = MachineState(memory_size=64)
    st.load_words(0, [asm_jal(0, 0)])  # spin forever
    assert run(st, max_steps=50) == "trap"
    assert "budget" in st.trap_cause


def test_load_hex_program_and_dump():
    st = MachineState(memory_size=256)
    st.load_hex_program("""
        # program header comment
        0: 00500093   # addi x1, x0, 5
        4: 00100073
    """)
    assert run(st) == "halted"
    assert st.regs[1] == 5
    d = st.dump()
    assert d["status"] == "halted" and len(d["regs"]) == 32
    assert len(d["memory_sha256"]) == 64


# --- custom instructions end to end --------------------------------------

def _machine_with_device(seed=42, puf_seed=99, p=0.02, capacity=16, mem=8192):
    dev = PufDevice(get_code("bch"), seed=seed, capacity=capacity)
    dev.register(3, SramPuf(puf_seed, p=p))
    st = MachineState(memory_size=mem, device=dev)
    return st, dev


def _write_init_block(st, addr, idx, c0):
    st.mem_write(addr, idx.to_bytes(4, "little") + c0.to_bytes(8, "little"))


def _write_chal_block(st, addr, idx, outer16):
    st.mem_write(addr, idx.to_bytes(4, "little") + outer16)


def test_init_and_chal_match_library_path():
    st, dev = _machine_with_device()
    outer = bytes(range(16))
    _write_init_block(st, 0x200, 3, 7)
    _write_chal_block(st, 0x220, 3, outer)
    st.load_words(0, [*li32(5, 0x200),
                      asm_inner_puf_init(10, 5),
                      *li32(6, 0x220),
                      *li32(7, 0x300),
                      asm_outer_puf_chal(11, 6, 7),
                      asm_ebreak()])
    assert run(st) == "halted"
    assert st.regs[10] == 0 and st.regs[11] == 0

    # mirror with direct library calls, re-deriving the device's seeds
    code = get_code("bch")
    rng_seed = derive_seed("device-enroll", 42, 3, 7)
    helper, r2 = enroll(SramPuf(99, p=0.02), 7, code, rng_seed)
    assert np.array_equal(helper.aux, dev.aux_table[3].aux)
    r3 = compose_response(r2, bytes_to_bits(outer), 127)
    assert st.mem_read(0x300, 32) == bits_to_bytes(r3)
    assert dev.read_count == 1


def test_unknown_index_reports_status_1():
    st, _ = _machine_with_device()
    _write_init_block(st, 0x200, 8, 0)  # idx 8 never registered
    st.load_words(0, [*li32(5, 0x200), asm_inner_puf_init(10, 5), asm_ebreak()])
    assert run(st) == "halted" and st.regs[10] == 1

    st, _ = _machine_with_device()
    _write_chal_block(st, 0x220, 3, bytes(16))  # registered but not enrolled
    st.load_words(0, [*li32(6, 0x220), *li32(7, 0x300),
                      asm_outer_puf_chal(11, 6, 7), asm_ebreak()])
    assert run(st) == "halted" and st.regs[11] == 1


def test_memory_fault_reports_status_2_without_side_effects():
    st, dev = _machine_with_device(mem=4096)
    st.load_words(0, [*li32(5, 4090),  # 12-byte block would cross the end
                      asm_inner_puf_init(10, 5), asm_ebreak()])
    assert run(st) == "halted"
    assert st.regs[10] == 2 and dev.aux_table == {}

    st, dev = _machine_with_device(mem=4096)
    dev.enroll_idx(3, 7)
    _write_chal_block(st, 0x220, 3, bytes(16))
    st.load_words(0, [*li32(6, 0x220), *li32(7, 4080),  # output would cross
                      asm_outer_puf_chal(11, 6, 7), asm_ebreak()])
    before = dev.read_count
    assert run(st) == "halted"
    assert st.regs[11] == 2 and dev.read_count == before


def test_width_mismatch_reports_status_3():
    dev = PufDevice(get_code("bch"), seed=1)
    dev.register(3, SramPuf(5, block_bits=64))  # 64-bit blocks vs n=127 code
    st = MachineState(memory_size=4096, device=dev)
    _write_init_block(st, 0x200, 3, 0)
    st.load_words(0, [*li32(5, 0x200), asm_inner_puf_init(10, 5), asm_ebreak()])
    assert run(st) == "halted"
    assert st.regs[10] == 3 and 3 not in dev.aux_table


def test_decode_failure_reports_status_4_and_consumes_read():
    # capacity-1 buffer: enrolling a second index evicts the first entry,
    # forcing the later sample to attempt a real (hopeless) reconstruction
    st, dev = _machine_with_device(p=0.45, capacity=1)
    dev.register(4, SramPuf(123, p=0.0))
    dev.enroll_idx(3, 7)
    dev.enroll_idx(4, 1)
    _write_chal_block(st, 0x220, 3, bytes(16))
    st.load_words(0, [*li32(6, 0x220), *li32(7, 0x300),
                      asm_outer_puf_chal(11, 6, 7), asm_ebreak()])
    assert run(st) == "halted"
    assert st.regs[11] == 4
    assert dev.read_count == 1
    assert st.mem_read(0x300, 32) == bytes(32)  # output untouched


def test_buffer_hit_still_consumes_a_read_seed():
    st, dev = _machine_with_device()
    dev.enroll_idx(3, 7)
    out = np.zeros(128, dtype=np.uint8)
    a = dev.sample_r3(3, out)
    b = dev.sample_r3(3, out)
    assert np.array_equal(a, b)
    assert dev.read_count == 2
    assert dev.buffer.hits == 2  # enrollment seeded the entry


def test_device_replay_is_deterministic():
    outs = []
    for _ in range(2):
        dev = PufDevice(get_code("bch"), seed=5, capacity=2)
        dev.register(0, SramPuf(1, p=0.03))
        dev.register(1, SramPuf(2, p=0.03))
        dev.enroll_idx(0, 10)
        dev.enroll_idx(1, 11)
        outer = np.ones(128, dtype=np.uint8)
        outs.append([dev.sample_r3(i % 2, outer) for i in range(6)])
    for a, b in zip(*outs):
        assert np.array_equal(a, b)


def test_custom_opcode_without_device_traps():
    st = MachineState(memory_size=256)
    st.load_words(0, [asm_inner_puf_init(10, 5)])
    assert run(st) == "trap"
    assert "no PUF device" in st.trap_cause
