#pragma once

namespace starsec {

// Reduces allocator system calls during training. Call once at process start; no-op off glibc.
void tune_allocator();

} // namespace starsec
