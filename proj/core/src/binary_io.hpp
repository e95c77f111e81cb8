#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace c2plus::bin {

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("binary stream truncated");
  return v;
}

template <typename T>
void put_vec(std::ostream& os, const std::vector<T>& v) {
  put(os, static_cast<std::uint64_t>(v.size()));
  for (const T& x : v) put(os, x);
}

template <typename T>
std::vector<T> get_vec(std::istream& is, std::uint64_t max_size = std::uint64_t{1} << 34) {
  const auto n = get<std::uint64_t>(is);
  if (n > max_size) throw std::runtime_error("binary stream corrupt: implausible length");
  std::vector<T> v(static_cast<std::size_t>(n));
  for (T& x : v) x = get<T>(is);
  return v;
}

}  // namespace c2plus::bin
