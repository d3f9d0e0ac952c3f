"""RV32I interpreter with two custom R-type PUF instructions.

The base machine is deliberately small: XLEN=32, flat little-endian memory,
no CSRs or privilege modes, EBREAK halts. Opcode 0101011 hosts the
extension: funct3=001 is the inner-PUF enrollment instruction and
funct3=010 the outer-challenge instruction. Both take memory addresses in
their source registers because their operands (96-bit parameter block,
256-bit response) do not fit a 32-bit register; rd receives a status code:

    0  success
    1  unknown / uninitialized PUF index
    2  memory fault on a parameter or output block
    3  code or width mismatch during enrollment
    4  reconstruction (decode) failure

Error paths leave the aux table, the output region, and the noise counter
untouched, except that a failed reconstruction consumes its noisy read.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from .buffer import LookasideBuffer, sample_with_buffer
from .extractor import enroll
from .hashing import bits_to_bytes, bytes_to_bits
from .prng import derive_seed

CUSTOM_OPCODE = 0b0101011
F3_INNER_INIT = 0b001
F3_OUTER_CHAL = 0b010

MASK32 = 0xFFFFFFFF


class IllegalInstruction(Exception):
    pass


class MemoryFault(Exception):
    pass


def _sext(value, bits):
    sign = 1 << (bits - 1)
    return (value & (sign - 1)) - (value & sign)


@dataclass
class Instr:
    name: str
    opcode: int
    rd: int = 0
    rs1: int = 0
    rs2: int = 0
    funct3: int = 0
    funct7: int = 0
    imm: int = 0


def encode_fields(instr):
    """Reassemble an R-type word from its decoded fields."""
    return (
        (instr.funct7 << 25) | (instr.rs2 << 20) | (instr.rs1 << 15)
        | (instr.funct3 << 12) | (instr.rd << 7) | instr.opcode
    )


_OP_NAMES = {0b000: ("add", "sub"), 0b001: ("sll", None), 0b010: ("slt", None),
             0b011: ("sltu", None), 0b100: ("xor", None), 0b101: ("srl", "sra"),
             0b110: ("or", None), 0b111: ("and", None)}
_IMM_NAMES = {0b000: "addi", 0b010: "slti", 0b011: "sltiu", 0b100: "xori",
              0b110: "ori", 0b111: "andi"}
_LOAD_NAMES = {0b000: "lb", 0b001: "lh", 0b010: "lw", 0b100: "lbu", 0b101: "lhu"}
_STORE_NAMES = {0b000: "sb", 0b001: "sh", 0b010: "sw"}
_BRANCH_NAMES = {0b000: "beq", 0b001: "bne", 0b100: "blt", 0b101: "bge",
                 0b110: "bltu", 0b111: "bgeu"}


def decode(word):
    """Decode a 32-bit word; raises IllegalInstruction on unknown encodings."""
    word &= MASK32
    opcode = word & 0x7F
    rd = (word >> 7) & 0x1F
    funct3 = (word >> 12) & 0x7
    rs1 = (word >> 15) & 0x1F
    rs2 = (word >> 20) & 0x1F
    funct7 = (word >> 25) & 0x7F
    common = dict(opcode=opcode, rd=rd, rs1=rs1, rs2=rs2, funct3=funct3, funct7=funct7)

    if opcode == CUSTOM_OPCODE:
        if funct7 != 0:
            raise IllegalInstruction(f"reserved funct7 {funct7:#x} at custom opcode")
        if funct3 == F3_INNER_INIT:
            if rs2 != 0:
                raise IllegalInstruction("inner_puf_init requires rs2=0")
            return Instr("inner_puf_init", **common)
        if funct3 == F3_OUTER_CHAL:
            return Instr("outer_puf_chal", **common)
        raise IllegalInstruction(f"reserved funct3 {funct3:#o} at custom opcode")

    if opcode == 0b0110111:
        return Instr("lui", **common, imm=word & 0xFFFFF000)
    if opcode == 0b0010111:
        return Instr("auipc", **common, imm=word & 0xFFFFF000)
    if opcode == 0b1101111:
        imm = ((word >> 31) << 20) | (((word >> 12) & 0xFF) << 12) \
            | (((word >> 20) & 1) << 11) | (((word >> 21) & 0x3FF) << 1)
        return Instr("jal", **common, imm=_sext(imm, 21))
    if opcode == 0b1100111 and funct3 == 0:
        return Instr("jalr", **common, imm=_sext(word >> 20, 12))
    if opcode == 0b1100011:
        if funct3 not in _BRANCH_NAMES:
            raise IllegalInstruction(f"bad branch funct3 {funct3:#o}")
        imm = ((word >> 31) << 12) | (((word >> 7) & 1) << 11) \
            | (((word >> 25) & 0x3F) << 5) | (((word >> 8) & 0xF) << 1)
        return Instr(_BRANCH_NAMES[funct3], **common, imm=_sext(imm, 13))
    if opcode == 0b0000011:
        if funct3 not in _LOAD_NAMES:
            raise IllegalInstruction(f"bad load funct3 {funct3:#o}")
        return Instr(_LOAD_NAMES[funct3], **common, imm=_sext(word >> 20, 12))
    if opcode == 0b0100011:
        if funct3 not in _STORE_NAMES:
            raise IllegalInstruction(f"bad store funct3 {funct3:#o}")
        imm = ((word >> 25) << 5) | rd
        return Instr(_STORE_NAMES[funct3], **common, imm=_sext(imm, 12))
    if opcode == 0b0010011:
        if funct3 == 0b001:
            if funct7 != 0:
                raise IllegalInstruction("bad slli encoding")
            return Instr("slli", **common, imm=rs2)
        if funct3 == 0b101:
            if funct7 == 0:
                return Instr("srli", **common, imm=rs2)
            if funct7 == 0b0100000:
                return Instr("srai", **common, imm=rs2)
            raise IllegalInstruction("bad shift encoding")
        return Instr(_IMM_NAMES[funct3], **common, imm=_sext(word >> 20, 12))
    if opcode == 0b0110011:
        name, alt = _OP_NAMES[funct3]
        if funct7 == 0b0100000 and alt is not None:
            return Instr(alt, **common)
        if funct7 == 0:
            return Instr(name, **common)
        raise IllegalInstruction(f"bad funct7 {funct7:#x} for register op")
    if opcode == 0b1110011 and word == 0x00100073:
        return Instr("ebreak", **common)
    raise IllegalInstruction(f"unknown instruction word {word:#010x}")


class PufDevice:
    """The PUF module seen by the custom instructions.

    Holds registered PUF instances, per-index helper data after enrollment,
    and the lookaside buffer. All enrollment and read randomness derives
    from the device seed, so a device replayed with the same instruction
    stream produces the same bytes.
    """

    def __init__(self, code, seed=0, capacity=16, hash_name="sha3-256"):
        self.code = code
        self.seed = int(seed)
        self.buffer = LookasideBuffer(capacity)
        self.hash_name = hash_name
        self.pufs = {}
        self.aux_table = {}
        self.enrolled_c0 = {}
        self.read_count = 0

    def register(self, idx, puf):
        self.pufs[int(idx)] = puf

    def enroll_idx(self, idx, c0):
        """Enroll pufs[idx] at inner challenge c0; seeds the buffer."""
        rng_seed = derive_seed("device-enroll", self.seed, idx, c0)
        helper, r2 = enroll(self.pufs[idx], c0, self.code, rng_seed)
        self.aux_table[idx] = helper
        self.enrolled_c0[idx] = c0
        self.buffer.insert((idx, c0), (r2, helper))
        return helper

    def sample_r3(self, idx, outer_bits):
        """Hashed response for an enrolled index; None on decode failure.

        Every call consumes one read seed, hit or miss, so replays stay
        aligned with instruction-driven executions.
        """
        noise_seed = derive_seed("device-read", self.seed, self.read_count)
        self.read_count += 1
        c0 = self.enrolled_c0[idx]
        return sample_with_buffer(
            self.buffer, self.pufs[idx], (idx, c0), self.aux_table[idx], self.code,
            mode="hashed", outer_challenge=outer_bits, noise_seed=noise_seed,
            hash_name=self.hash_name,
        )


class MachineState:
    def __init__(self, memory_size=1 << 20, device=None):
        self.regs = [0] * 32
        self.pc = 0
        self.memory = bytearray(memory_size)
        self.device = device
        self.status = "continue"
        self.trap_cause = None

    def write_reg(self, rd, value):
        if rd != 0:
            self.regs[rd] = value & MASK32

    def mem_read(self, addr, length):
        if addr < 0 or addr + length > len(self.memory):
            raise MemoryFault(f"read [{addr:#x}, +{length}) out of bounds")
        return bytes(self.memory[addr : addr + length])

    def mem_write(self, addr, data):
        if addr < 0 or addr + len(data) > len(self.memory):
            raise MemoryFault(f"write [{addr:#x}, +{len(data)}) out of bounds")
        self.memory[addr : addr + len(data)] = data

    def load_words(self, addr, words):
        for i, w in enumerate(words):
            self.mem_write(addr + 4 * i, int(w).to_bytes(4, "little"))

    def load_hex_program(self, text, base=0):
        """Load lines of the form 'ADDR: WORD' (hex); '#' starts a comment."""
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            addr_s, word_s = line.split(":")
            self.mem_write(base + int(addr_s, 16), int(word_s, 16).to_bytes(4, "little"))

    def dump(self):
        """JSON-ready snapshot: registers, pc, status, memory digest."""
        return {
            "pc": self.pc,
            "status": self.status,
            "trap_cause": self.trap_cause,
            "regs": list(self.regs),
            "memory_sha256": hashlib.sha256(self.memory).hexdigest(),
        }


def _exec_inner_puf_init(state, instr):
    dev = state.device
    try:
        block = state.mem_read(state.regs[instr.rs1], 12)
    except MemoryFault:
        state.write_reg(instr.rd, 2)
        return
    idx = int.from_bytes(block[0:4], "little")
    c0 = int.from_bytes(block[4:12], "little")
    if idx not in dev.pufs:
        state.write_reg(instr.rd, 1)
        return
    try:
        dev.enroll_idx(idx, c0)
    except ValueError:
        state.write_reg(instr.rd, 3)
        return
    state.write_reg(instr.rd, 0)


def _exec_outer_puf_chal(state, instr):
    dev = state.device
    try:
        block = state.mem_read(state.regs[instr.rs1], 20)
        out_addr = state.regs[instr.rs2]
        state.mem_read(out_addr, 32)  # validate the output region up front
    except MemoryFault:
        state.write_reg(instr.rd, 2)
        return
    idx = int.from_bytes(block[0:4], "little")
    if idx not in dev.aux_table:
        state.write_reg(instr.rd, 1)
        return
    outer_bits = bytes_to_bits(block[4:20])
    r3 = dev.sample_r3(idx, outer_bits)
    if r3 is None:
        state.write_reg(instr.rd, 4)
        return
    state.mem_write(out_addr, bits_to_bytes(r3))
    state.write_reg(instr.rd, 0)


def step(state):
    """Fetch/decode/execute one instruction; returns the new machine status.

    Traps (illegal instruction, fetch/load/store fault, misaligned jump)
    leave pc pointing at the faulting instruction.
    """
    pc = state.pc
    try:
        word = int.from_bytes(state.mem_read(pc, 4), "little")
        instr = decode(word)
    except (MemoryFault, IllegalInstruction) as exc:
        state.status = "trap"
        state.trap_cause = str(exc)
        return state.status

    regs = state.regs
    name = instr.name
    next_pc = (pc + 4) & MASK32
    try:
        if name == "ebreak":
            state.status = "halted"
            return state.status
        if name in ("inner_puf_init", "outer_puf_chal"):
            if state.device is None:
                raise IllegalInstruction("custom opcode with no PUF device attached")
            if name == "inner_puf_init":
                _exec_inner_puf_init(state, instr)
            else:
                _exec_outer_puf_chal(state, instr)
        elif name == "lui":
            state.write_reg(instr.rd, instr.imm)
        elif name == "auipc":
            state.write_reg(instr.rd, pc + instr.imm)
        elif name == "jal":
            state.write_reg(instr.rd, pc + 4)
            next_pc = (pc + instr.imm) & MASK32
        elif name == "jalr":
            target = (regs[instr.rs1] + instr.imm) & ~1 & MASK32
            state.write_reg(instr.rd, pc + 4)
            next_pc = target
        elif name in _BRANCH_NAMES.values():
            a, b = regs[instr.rs1], regs[instr.rs2]
            sa, sb = _sext(a, 32), _sext(b, 32)
            taken = {
                "beq": a == b, "bne": a != b, "blt": sa < sb, "bge": sa >= sb,
                "bltu": a < b, "bgeu": a >= b,
            }[name]
            if taken:
                next_pc = (pc + instr.imm) & MASK32
        elif name in _LOAD_NAMES.values():
            addr = (regs[instr.rs1] + instr.imm) & MASK32
            size = {"lb": 1, "lbu": 1, "lh": 2, "lhu": 2, "lw": 4}[name]
            val = int.from_bytes(state.mem_read(addr, size), "little")
            if name in ("lb", "lh"):
                val = _sext(val, size * 8) & MASK32
            state.write_reg(instr.rd, val)
        elif name in _STORE_NAMES.values():
            addr = (regs[instr.rs1] + instr.imm) & MASK32
            size = {"sb": 1, "sh": 2, "sw": 4}[name]
            state.mem_write(addr, (regs[instr.rs2] & ((1 << (size * 8)) - 1)).to_bytes(size, "little"))
        else:
            state.write_reg(instr.rd, _alu(name, instr, regs))
    except (MemoryFault, IllegalInstruction) as exc:
        state.status = "trap"
        state.trap_cause = str(exc)
        return state.status

    if next_pc % 4 != 0:
        state.status = "trap"
        state.trap_cause = f"misaligned jump target {next_pc:#x}"
        return state.status
    state.pc = next_pc
    state.status = "continue"
    return state.status


_IMM_ALU = {"addi", "slti", "sltiu", "xori", "ori", "andi", "slli", "srli", "srai"}


def _alu(name, instr, regs):
    a = regs[instr.rs1]
    b = instr.imm if name in _IMM_ALU else regs[instr.rs2]
    sa = _sext(a, 32)
    if name in ("addi", "add"):
        return a + b
    if name == "sub":
        return a - b
    if name in ("xori", "xor"):
        return a ^ b
    if name in ("ori", "or"):
        return a | b
    if name in ("andi", "and"):
        return a & b
    if name in ("slti", "slt"):
        return int(sa < _sext(b, 32))
    if name in ("sltiu", "sltu"):
        return int(a < (b & MASK32))
    shamt = b & 0x1F
    if name in ("slli", "sll"):
        return a << shamt
    if name in ("srli", "srl"):
        return a >> shamt
    if name in ("srai", "sra"):
        return sa >> shamt
    raise IllegalInstruction(f"unhandled ALU op {name}")


def run(state, max_steps=1_000_000):
    """Step until halt or trap; returns the final status."""
    for _ in range(max_steps):
        if step(state) != "continue":
            return state.status
    state.status = "trap"
    state.trap_cause = f"step budget of {max_steps} exhausted"
    return state.status


# small assembler, just enough for test programs and demos

def asm_r(opcode, funct3, funct7, rd, rs1, rs2):
    return (funct7 << 25) | (rs2 << 20) | (rs1 << 15) | (funct3 << 12) | (rd << 7) | opcode


def asm_i(opcode, funct3, rd, rs1, imm):
    return ((imm & 0xFFF) << 20) | (rs1 << 15) | (funct3 << 12) | (rd << 7) | opcode


def asm_lui(rd, imm20):
    return ((imm20 & 0xFFFFF) << 12) | (rd << 7) | 0b0110111


def asm_addi(rd, rs1, imm):
    return asm_i(0b0010011, 0b000, rd, rs1, imm)


def asm_add(rd, rs1, rs2):
    return asm_r(0b0110011, 0b000, 0, rd, rs1, rs2)


def asm_lw(rd, rs1, imm):
    return asm_i(0b0000011, 0b010, rd, rs1, imm)


def asm_sw(rs1, rs2, imm):
    """Store regs[rs2] to memory[regs[rs1] + imm]."""
    return ((imm >> 5) & 0x7F) << 25 | (rs2 << 20) | (rs1 << 15) | (0b010 << 12) \
        | ((imm & 0x1F) << 7) | 0b0100011


def asm_beq(rs1, rs2, offset):
    imm = offset
    return (((imm >> 12) & 1) << 31) | (((imm >> 5) & 0x3F) << 25) | (rs2 << 20) \
        | (rs1 << 15) | (0b000 << 12) | (((imm >> 1) & 0xF) << 8) \
        | (((imm >> 11) & 1) << 7) | 0b1100011


def asm_jal(rd, offset):
    imm = offset
    return (((imm >> 20) & 1) << 31) | (((imm >> 1) & 0x3FF) << 21) \
        | (((imm >> 11) & 1) << 20) | (((imm >> 12) & 0xFF) << 12) | (rd << 7) | 0b1101111


def asm_ebreak():
    return 0x00100073


def asm_inner_puf_init(rd, rs1):
    return asm_r(CUSTOM_OPCODE, F3_INNER_INIT, 0, rd, rs1, 0)


def asm_outer_puf_chal(rd, rs1, rs2):
    return asm_r(CUSTOM_OPCODE, F3_OUTER_CHAL, 0, rd, rs1, rs2)


def li32(rd, value):
    """Two-instruction sequence loading an arbitrary 32-bit constant."""
    value &= MASK32
    upper = (value + 0x800) >> 12
    lower = value - (upper << 12)
    return [asm_lui(rd, upper), asm_addi(rd, rd, lower)]
