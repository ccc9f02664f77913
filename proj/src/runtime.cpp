#include "starsec/runtime.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace starsec {

void tune_allocator()
{
#if defined(__GLIBC__)
    // Grow the heap in large steps; per-update temporaries otherwise cost a brk round trip each.
    mallopt(M_TOP_PAD, 64 << 20);
#endif
}

} // namespace starsec
