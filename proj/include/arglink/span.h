#ifndef ARGLINK_SPAN_H_
#define ARGLINK_SPAN_H_

#include <compare>
#include <string>

namespace arglink {

// Inclusive token range [start, end].
struct Span {
  int start = 0;
  int end = 0;

  int width() const { return end - start + 1; }
  bool overlaps(const Span& o) const { return start <= o.end && o.start <= end; }
  bool contains(const Span& o) const { return start <= o.start && o.end <= end; }

  auto operator<=>(const Span&) const = default;
};

inline std::string to_string(const Span& s) {
  return "[" + std::to_string(s.start) + "," + std::to_string(s.end) + "]";
}

}  // namespace arglink

#endif  // ARGLINK_SPAN_H_
