#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>

namespace flowlens {

// Synthetic flights table as CSV (distance,delay): distance ~ U(100, 5000) miles and
// delay ~ N(10 + distance / 200, 30) minutes, one decimal each. Same seed, same bytes.
void write_flights_csv(std::ostream& out, std::size_t rows, std::uint64_t seed = 42);

} // namespace flowlens
