#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "gpc/devinfo.hpp"
#include "xml_lite.hpp"

using namespace gpc::devinfo;

namespace {

// A plausible accelerator record with every field set; the values are
// arbitrary but frozen together with the golden document below.
DeviceInfo synthetic_device() {
  DeviceInfo d;
  d.name = "Synthetic Accelerator";
  d.compute_capability = "1.3";
  d.warp_size = 32;
  d.total_constant_memory = 65536;
  d.total_global_memory = 4294967296ull;
  d.shared_memory_per_block = 16384;
  d.clock_rate_khz = 1300000;
  d.multi_processor_count = 30;
  d.registers_per_block = 16384;
  d.max_threads_per_block = 512;
  d.max_grid_size = {65535, 65535, 1};
  d.max_threads_dim = {512, 512, 64};
  return d;
}

const char* const kGolden =
    "<?xml version=\"1.0\"?>\n"
    "<gpgpu_server>\n"
    "  <device index=\"0\">\n"
    "    <name>Synthetic Accelerator</name>\n"
    "    <compute_capability>1.3</compute_capability>\n"
    "    <warp_size>32</warp_size>\n"
    "    <total_constant_memory>65536</total_constant_memory>\n"
    "    <total_global_memory>4294967296</total_global_memory>\n"
    "    <shared_memory_per_block>16384</shared_memory_per_block>\n"
    "    <clock_rate_khz>1300000</clock_rate_khz>\n"
    "    <multi_processor_count>30</multi_processor_count>\n"
    "    <registers_per_block>16384</registers_per_block>\n"
    "    <max_threads_per_block>512</max_threads_per_block>\n"
    "    <max_grid_size>65535 65535 1</max_grid_size>\n"
    "    <max_threads_dim>512 512 64</max_threads_dim>\n"
    "  </device>\n"
    "</gpgpu_server>\n";

const char* const kTagOrder[] = {
    "name",
    "compute_capability",
    "warp_size",
    "total_constant_memory",
    "total_global_memory",
    "shared_memory_per_block",
    "clock_rate_khz",
    "multi_processor_count",
    "registers_per_block",
    "max_threads_per_block",
    "max_grid_size",
    "max_threads_dim",
};

}  // namespace

TEST_CASE("device xml matches the golden document byte for byte") {
  const std::vector<DeviceInfo> devices = {synthetic_device()};
  CHECK(to_xml(devices) == kGolden);
  // Rendering is a pure function of the list.
  CHECK(to_xml(devices) == to_xml(devices));
}

TEST_CASE("device xml parses back with all twelve attributes in order") {
  const std::vector<DeviceInfo> devices = {synthetic_device()};
  const gpcref::XmlNode root = gpcref::parse_xml(to_xml(devices));
  CHECK(root.name == "gpgpu_server");
  REQUIRE(root.children.size() == 1);

  const gpcref::XmlNode& dev = root.children[0];
  CHECK(dev.name == "device");
  CHECK(dev.attr("index") == "0");
  REQUIRE(dev.children.size() == 12);
  for (std::size_t i = 0; i < 12; ++i) CHECK(dev.children[i].name == kTagOrder[i]);

  CHECK(dev.child("name")->text == "Synthetic Accelerator");
  CHECK(dev.child("compute_capability")->text == "1.3");
  CHECK(dev.child("warp_size")->text == "32");
  CHECK(dev.child("total_constant_memory")->text == "65536");
  CHECK(dev.child("total_global_memory")->text == "4294967296");
  CHECK(dev.child("shared_memory_per_block")->text == "16384");
  CHECK(dev.child("clock_rate_khz")->text == "1300000");
  CHECK(dev.child("multi_processor_count")->text == "30");
  CHECK(dev.child("registers_per_block")->text == "16384");
  CHECK(dev.child("max_threads_per_block")->text == "512");
  CHECK(dev.child("max_grid_size")->text == "65535 65535 1");
  CHECK(dev.child("max_threads_dim")->text == "512 512 64");
}

TEST_CASE("device names are escaped and recovered") {
  DeviceInfo d = synthetic_device();
  d.name = "R&D <proto> v2";
  const std::vector<DeviceInfo> devices = {d};
  const std::string xml = to_xml(devices);
  CHECK(xml.find("R&amp;D &lt;proto&gt; v2") != std::string::npos);
  CHECK(xml.find("R&D") == std::string::npos);

  const gpcref::XmlNode root = gpcref::parse_xml(xml);
  CHECK(root.children[0].child("name")->text == "R&D <proto> v2");
}

TEST_CASE("an empty device list renders a self-closing root") {
  CHECK(to_xml({}) == "<?xml version=\"1.0\"?>\n<gpgpu_server/>\n");
  const gpcref::XmlNode root =
      gpcref::parse_xml(to_xml({}));
  CHECK(root.name == "gpgpu_server");
  CHECK(root.children.empty());
}

TEST_CASE("multiple devices are indexed in probe order") {
  DeviceInfo a = synthetic_device();
  DeviceInfo b = synthetic_device();
  b.name = "Second Card";
  const std::vector<DeviceInfo> devices = {a, b};
  const gpcref::XmlNode root = gpcref::parse_xml(to_xml(devices));
  REQUIRE(root.children.size() == 2);
  CHECK(root.children[0].attr("index") == "0");
  CHECK(root.children[1].attr("index") == "1");
  CHECK(root.children[1].child("name")->text == "Second Card");
}

TEST_CASE("the host prober reports one well-formed device") {
  const std::vector<DeviceInfo> devices = HostCpuProber{}.probe();
  REQUIRE(devices.size() == 1);
  const DeviceInfo& d = devices[0];
  CHECK_FALSE(d.name.empty());
  CHECK_FALSE(d.compute_capability.empty());
  CHECK(d.warp_size >= 0);
  CHECK(d.clock_rate_khz >= 0);
  CHECK(d.multi_processor_count >= 1);  // hardware_concurrency is nonzero here

  // Whatever the host yields must render to parseable XML.
  const gpcref::XmlNode root = gpcref::parse_xml(to_xml(devices));
  CHECK(root.children.size() == 1);
  CHECK(root.children[0].children.size() == 12);
}

TEST_CASE("the test xml reader rejects malformed documents") {
  CHECK_THROWS_AS(gpcref::parse_xml(""), std::runtime_error);
  CHECK_THROWS_AS(gpcref::parse_xml("<a><b></a>"), std::runtime_error);
  CHECK_THROWS_AS(gpcref::parse_xml("<a></a><b/>"), std::runtime_error);
  CHECK(gpcref::parse_xml("<t>&amp;&lt;&gt;&quot;&apos;</t>").text ==
        "&<>\"'");
}
