/* Native stand-in for a generated vector kernel so the driver builds and
 * runs on any host. Verifies the buffer-alignment half of the contract
 * and performs a trivial timed loop. */
#include <stdint.h>

void rvvprobe_kernel(uint64_t iterations, void *buffer)
{
    if (((uintptr_t)buffer & 63u) != 0u)
        __builtin_trap();
    volatile uint8_t *bytes = (volatile uint8_t *)buffer;
    uint64_t acc = 0;
    for (uint64_t i = 0; i < iterations; i++)
        acc += bytes[i & 63u];
    bytes[0] = (uint8_t)acc;
}
