#include "gpc/devinfo.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <unistd.h>

namespace gpc::devinfo {

namespace {

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  std::size_t b = s.find_last_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

void tag(std::ostringstream& out, const char* name, const std::string& value) {
  out << "    <" << name << ">" << xml_escape(value) << "</" << name << ">\n";
}

void tag(std::ostringstream& out, const char* name, std::int64_t value) {
  out << "    <" << name << ">" << value << "</" << name << ">\n";
}

void tag(std::ostringstream& out, const char* name, std::uint64_t value) {
  out << "    <" << name << ">" << value << "</" << name << ">\n";
}

void tag(std::ostringstream& out, const char* name,
         const std::array<int, 3>& triple) {
  out << "    <" << name << ">" << triple[0] << " " << triple[1] << " "
      << triple[2] << "</" << name << ">\n";
}

}  // namespace

std::vector<DeviceInfo> HostCpuProber::probe() const {
  DeviceInfo dev;
  dev.name = "n/a";
  dev.compute_capability = "n/a";

  std::ifstream cpuinfo("/proc/cpuinfo");
  std::string line;
  bool have_name = false, have_mhz = false;
  while (std::getline(cpuinfo, line)) {
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = trim(line.substr(0, colon));
    const std::string value = trim(line.substr(colon + 1));
    if (!have_name && key == "model name" && !value.empty()) {
      dev.name = value;
      have_name = true;
    } else if (!have_mhz && key == "cpu MHz" && !value.empty()) {
      try {
        dev.clock_rate_khz =
            static_cast<std::int64_t>(std::llround(std::stod(value) * 1000.0));
        have_mhz = true;
      } catch (...) {
      }
    }
    if (have_name && have_mhz) break;
  }

  const unsigned cores = std::thread::hardware_concurrency();
  dev.multi_processor_count = cores > 0 ? static_cast<int>(cores) : 0;

  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page_size = sysconf(_SC_PAGE_SIZE);
  if (pages > 0 && page_size > 0)
    dev.total_global_memory = static_cast<std::uint64_t>(pages) *
                              static_cast<std::uint64_t>(page_size);

  return {dev};
}

std::string to_xml(std::span<const DeviceInfo> devices) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\"?>\n";
  if (devices.empty()) {
    out << "<gpgpu_server/>\n";
    return out.str();
  }

  out << "<gpgpu_server>\n";
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const DeviceInfo& d = devices[i];
    out << "  <device index=\"" << i << "\">\n";
    tag(out, "name", d.name);
    tag(out, "compute_capability", d.compute_capability);
    tag(out, "warp_size", static_cast<std::int64_t>(d.warp_size));
    tag(out, "total_constant_memory", d.total_constant_memory);
    tag(out, "total_global_memory", d.total_global_memory);
    tag(out, "shared_memory_per_block", d.shared_memory_per_block);
    tag(out, "clock_rate_khz", d.clock_rate_khz);
    tag(out, "multi_processor_count",
        static_cast<std::int64_t>(d.multi_processor_count));
    tag(out, "registers_per_block",
        static_cast<std::int64_t>(d.registers_per_block));
    tag(out, "max_threads_per_block",
        static_cast<std::int64_t>(d.max_threads_per_block));
    tag(out, "max_grid_size", d.max_grid_size);
    tag(out, "max_threads_dim", d.max_threads_dim);
    out << "  </device>\n";
  }
  out << "</gpgpu_server>\n";
  return out.str();
}

}  // namespace gpc::devinfo
