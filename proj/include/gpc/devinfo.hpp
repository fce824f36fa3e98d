#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

// Compute-device inventory and its canonical XML rendering.
//
// Twelve attributes per device, mirroring the usual accelerator property
// set. On hosts without an accelerator the CPU prober fills what it can
// from /proc/cpuinfo and sysconf; integer attributes it cannot know are 0
// and string attributes are "n/a".
//
// The XML is deterministic byte-for-byte for a given device list: fixed
// prolog, 2-space indent, \n line endings, snake_case tags named after the
// fields, devices in probe order with an index attribute, triples rendered
// as three space-separated integers, &<> escaped.

namespace gpc::devinfo {

struct DeviceInfo {
  std::string name;
  std::string compute_capability;  // "major.minor" or "n/a"
  int warp_size = 0;
  std::uint64_t total_constant_memory = 0;   // bytes
  std::uint64_t total_global_memory = 0;     // bytes
  std::uint64_t shared_memory_per_block = 0; // bytes
  std::int64_t clock_rate_khz = 0;
  int multi_processor_count = 0;
  int registers_per_block = 0;
  int max_threads_per_block = 0;
  std::array<int, 3> max_grid_size{0, 0, 0};
  std::array<int, 3> max_threads_dim{0, 0, 0};

  bool operator==(const DeviceInfo&) const = default;
};

class DeviceProber {
 public:
  virtual ~DeviceProber() = default;
  virtual std::vector<DeviceInfo> probe() const = 0;
};

// Reads /proc/cpuinfo and sysconf. Never throws; unknown values degrade to
// 0 / "n/a".
class HostCpuProber : public DeviceProber {
 public:
  std::vector<DeviceInfo> probe() const override;
};

std::string to_xml(std::span<const DeviceInfo> devices);

}  // namespace gpc::devinfo
