#ifndef ARGLINK_CHECKPOINT_H_
#define ARGLINK_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "arglink/config.h"

namespace arglink {

struct Tensor {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::vector<float> data;  // row-major
};

struct Checkpoint {
  ModelConfig config;
  std::vector<std::string> roles;  // index order of the role table
  std::vector<Tensor> tensors;
  double best_dev_f1 = 0.0;
  int epoch = 0;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout: "ALCK", u32 version, u64 manifest length, JSON manifest, then each
// tensor as little-endian float32 in manifest order.
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
// Throws FormatError on a bad magic number, an unsupported version or a
// truncated file.
Checkpoint load_checkpoint(const std::string& path);
Checkpoint read_checkpoint(std::istream& in);

}  // namespace arglink

#endif  // ARGLINK_CHECKPOINT_H_
