"""Drive the PUF through the two custom instructions on the RV32I core.

The program below enrolls PUF index 3 from a parameter block in memory,
then requests a hashed response into a 32-byte output region. Both custom
instructions return a status code in rd; the response lands in memory, not
in a register, because 256 bits do not fit one.
"""

from risecure.extractor import get_code
from risecure.hashing import bits_to_bytes, bytes_to_bits
from risecure.isa import (MachineState, PufDevice, asm_ebreak,
                          asm_inner_puf_init, asm_outer_puf_chal, decode, li32,
                          run)
from risecure.puf import SramPuf

device = PufDevice(get_code("bch"), seed=42, capacity=16)
device.register(3, SramPuf(99, p=0.02))
st = MachineState(memory_size=8192, device=device)

IDX, C0 = 3, 7
OUTER = bytes(range(16))
st.mem_write(0x200, IDX.to_bytes(4, "little") + C0.to_bytes(8, "little"))
st.mem_write(0x220, IDX.to_bytes(4, "little") + OUTER)

program = [*li32(5, 0x200),            # x5 -> init parameter block
           asm_inner_puf_init(10, 5),  # x10 <- status
           *li32(6, 0x220),            # x6 -> challenge block
           *li32(7, 0x300),            # x7 -> output region
           asm_outer_puf_chal(11, 6, 7),
           asm_ebreak()]
st.load_words(0, program)

print("program:")
for i, word in enumerate(program):
    print(f"  {4 * i:#06x}: {word:08x}  {decode(word).name}")
print()

status = run(st)
print(f"machine status: {status}")
print(f"inner_puf_init status (x10): {st.regs[10]}")
print(f"outer_puf_chal status (x11): {st.regs[11]}")
print(f"R3 at 0x300: {st.mem_read(0x300, 32).hex()}")
print()

# the library path with the same seeds produces the same bytes
mirror = PufDevice(get_code("bch"), seed=42, capacity=16)
mirror.register(3, SramPuf(99, p=0.02))
mirror.enroll_idx(IDX, C0)
r3 = mirror.sample_r3(IDX, bytes_to_bits(OUTER))
print(f"library path agrees: {bits_to_bytes(r3) == st.mem_read(0x300, 32)}")
print()

# error paths report through rd instead of trapping
st2 = MachineState(memory_size=8192, device=device)
st2.mem_write(0x200, (9).to_bytes(4, "little") + C0.to_bytes(8, "little"))
st2.load_words(0, [*li32(5, 0x200), asm_inner_puf_init(10, 5), asm_ebreak()])
run(st2)
print(f"enrolling unknown index 9 -> status {st2.regs[10]} (1 = unknown index)")
