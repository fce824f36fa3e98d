#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "gpc/demosaic.hpp"
#include "gpc/devinfo.hpp"
#include "gpc/lsq.hpp"
#include "gpc/registry.hpp"
#include "gpc/tasks.hpp"
#include "test_util.hpp"

using namespace gpc;
using namespace gpc::task;
using testutil::thrown_code;

namespace {

wire::Frame make_frame(std::string flag, std::string params,
                       std::vector<std::uint8_t> payload,
                       std::string name = "out.bin") {
  wire::Frame frame;
  frame.header.task_flag = std::move(flag);
  frame.header.data_marker =
      payload.empty() ? wire::kMarkerNone : wire::kMarkerData;
  frame.header.params = std::move(params);
  frame.header.output_name = std::move(name);
  frame.payload = std::move(payload);
  return frame;
}

std::vector<std::uint8_t> mosaic_payload(std::size_t rows, std::size_t cols,
                                         std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::vector<std::uint8_t> bytes(rows * cols * 2);
  for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
  return bytes;
}

void put_f64_le(std::vector<std::uint8_t>& out, double v) {
  const auto u = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

double get_f64_le(const std::uint8_t* p) {
  std::uint64_t u = 0;
  for (int i = 7; i >= 0; --i) u = (u << 8) | p[i];
  return std::bit_cast<double>(u);
}

std::shared_ptr<const DeviceList> one_device() {
  devinfo::DeviceInfo d;
  d.name = "Test Device";
  d.compute_capability = "1.3";
  d.warp_size = 32;
  d.clock_rate_khz = 1300000;
  d.multi_processor_count = 30;
  d.total_global_memory = 4294967296ull;
  auto list = std::make_shared<DeviceList>();
  list->push_back(d);
  return list;
}

TaskDescriptor noop_descriptor(std::string flag) {
  TaskDescriptor d;
  d.flag = std::move(flag);
  d.payload_rule = [](const wire::ParamMap&) { return std::uint64_t{0}; };
  d.handler = [](const wire::ParamMap&, std::span<const std::uint8_t>) {
    return TaskOutput{};
  };
  return d;
}

}  // namespace

TEST_CASE("the builtin registry serves four case-sensitive flags") {
  par::ExecPlan plan{1};
  const TaskRegistry registry = make_builtin_registry(plan, one_device());
  const std::vector<std::string> flags = registry.flags();
  const std::vector<std::string> expected = {"BAYER_BILINEAR", "BAYER_GRADIENT",
                                             "DEVINFO", "LSQ_POLYFIT"};
  CHECK(flags == expected);
  CHECK(registry.lookup("DEVINFO").flag == "DEVINFO");
  CHECK(thrown_code([&] { registry.lookup("devinfo"); }) == Errc::UnknownTask);
  CHECK(thrown_code([&] { registry.lookup(""); }) == Errc::UnknownTask);
}

TEST_CASE("registering a descriptor validates flag and callbacks") {
  TaskRegistry registry;
  registry.add(noop_descriptor("ALPHA"));
  CHECK(thrown_code([&] { registry.add(noop_descriptor("ALPHA")); }) ==
        Errc::DuplicateFlag);
  CHECK(thrown_code([&] { registry.add(noop_descriptor("")); }) ==
        Errc::FieldTooLong);
  CHECK(thrown_code([&] {
          registry.add(noop_descriptor(std::string(30, 'A')));
        }) == Errc::FieldTooLong);
  CHECK(thrown_code([&] { registry.add(noop_descriptor("BAD\x01FLAG")); }) ==
        Errc::InvalidCharacter);

  TaskDescriptor no_handler = noop_descriptor("BETA");
  no_handler.handler = nullptr;
  CHECK(thrown_code([&] { registry.add(no_handler); }) == Errc::BadValue);
  TaskDescriptor no_rule = noop_descriptor("GAMMA");
  no_rule.payload_rule = nullptr;
  CHECK(thrown_code([&] { registry.add(no_rule); }) == Errc::BadValue);

  // A 29-char flag exactly fills the slot.
  registry.add(noop_descriptor(std::string(29, 'Z')));
}

TEST_CASE("dispatching a demosaic request returns the kernel bytes") {
  par::ExecPlan plan{2};
  const TaskRegistry registry = make_builtin_registry(plan, one_device());

  const std::vector<std::uint8_t> payload = mosaic_payload(4, 6, 11);
  const DispatchResult result = dispatch(
      registry,
      make_frame("BAYER_BILINEAR", "rows=4,cols=6,phase=GRBG", payload));

  REQUIRE(result.status == "OK");
  CHECK(result.params.get_uint("rows") == 4);
  CHECK(result.params.get_uint("cols") == 6);
  CHECK(result.params.get_uint("planes") == 3);
  CHECK(result.params.get_uint("bytes") == result.payload.size());
  CHECK_FALSE(result.params.has("msg"));

  const img::BayerImage image =
      img::bayer_from_le_bytes(4, 6, img::CfaPhase::GRBG, payload);
  CHECK(result.payload == img::rgb_to_le_bytes(img::demosaic_bilinear(image, plan)));

  const DispatchResult grad = dispatch(
      registry,
      make_frame("BAYER_GRADIENT", "rows=4,cols=6,phase=GRBG", payload));
  REQUIRE(grad.status == "OK");
  CHECK(grad.payload == img::rgb_to_le_bytes(img::demosaic_gradient(image, plan)));
}

TEST_CASE("dispatching a polyfit request returns coefficients and sse") {
  par::ExecPlan plan{1};
  const TaskRegistry registry = make_builtin_registry(plan, one_device());

  std::vector<std::uint8_t> payload;
  for (double y : {3.0, 5.0, 7.0, 9.0}) put_f64_le(payload, y);

  const DispatchResult result = dispatch(
      registry,
      make_frame("LSQ_POLYFIT", "lines=1,pixels=4,order=1", payload));
  REQUIRE(result.status == "OK");
  CHECK(result.params.get_uint("lines") == 1);
  CHECK(result.params.get_uint("order") == 1);
  REQUIRE(result.payload.size() == 3 * 8);
  CHECK(get_f64_le(result.payload.data()) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(get_f64_le(result.payload.data() + 8) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(get_f64_le(result.payload.data() + 16) <= 1e-12);
}

TEST_CASE("dispatching devinfo serves the cached snapshot") {
  par::ExecPlan plan{1};
  const auto devices = one_device();
  const TaskRegistry registry = make_builtin_registry(plan, devices);

  const DispatchResult result =
      dispatch(registry, make_frame("DEVINFO", "", {}));
  REQUIRE(result.status == "OK");
  CHECK(result.params.get_uint("devices") == 1);

  const std::string xml = devinfo::to_xml(*devices);
  CHECK(result.payload ==
        std::vector<std::uint8_t>(xml.begin(), xml.end()));
  CHECK(result.params.get_uint("bytes") == xml.size());

  // Replays are byte-identical.
  const DispatchResult again =
      dispatch(registry, make_frame("DEVINFO", "", {}));
  CHECK(again.payload == result.payload);
}

TEST_CASE("dispatch maps failures onto the response code set") {
  par::ExecPlan plan{1};
  const TaskRegistry registry = make_builtin_registry(plan, one_device());

  SUBCASE("unknown flag") {
    const DispatchResult r =
        dispatch(registry, make_frame("NO_SUCH_TASK", "", {}));
    CHECK(r.status == "ERR:UNKNOWN_TASK");
    CHECK(r.params.get("msg").find("NO_SUCH_TASK") != std::string::npos);
    CHECK(r.payload.empty());
  }

  SUBCASE("missing required param") {
    const DispatchResult r = dispatch(
        registry, make_frame("BAYER_BILINEAR", "rows=4", mosaic_payload(4, 4, 1)));
    CHECK(r.status == "ERR:MISSING_PARAM");
    CHECK(r.params.get("msg").find("cols") != std::string::npos);
  }

  SUBCASE("unparseable param value") {
    const DispatchResult r = dispatch(
        registry,
        make_frame("BAYER_BILINEAR", "rows=abc,cols=4", mosaic_payload(4, 4, 2)));
    CHECK(r.status == "ERR:BAD_HEADER");
  }

  SUBCASE("unparseable params string") {
    const DispatchResult r =
        dispatch(registry, make_frame("BAYER_BILINEAR", "==,,", {}));
    CHECK(r.status == "ERR:BAD_HEADER");
  }

  SUBCASE("oversize dimensions") {
    const DispatchResult r = dispatch(
        registry,
        make_frame("BAYER_BILINEAR", "rows=1048576,cols=1048576",
                   mosaic_payload(2, 2, 3)));
    CHECK(r.status == "ERR:TOO_LARGE");
  }

  SUBCASE("payload shorter than the rule demands") {
    std::vector<std::uint8_t> tiny(100, 0);
    const DispatchResult r = dispatch(
        registry, make_frame("BAYER_BILINEAR", "rows=2048,cols=2048", tiny));
    CHECK(r.status == "ERR:PAYLOAD_MISMATCH");
    CHECK(r.params.get("msg").find("8388608") != std::string::npos);
  }

  SUBCASE("missing payload marker") {
    const DispatchResult r = dispatch(
        registry, make_frame("BAYER_BILINEAR", "rows=4,cols=4", {}));
    CHECK(r.status == "ERR:PAYLOAD_MISMATCH");
    CHECK(r.params.get("msg").find("no payload marker") != std::string::npos);
  }

  SUBCASE("payload where none is expected") {
    const DispatchResult r = dispatch(
        registry, make_frame("DEVINFO", "", std::vector<std::uint8_t>(4, 0)));
    CHECK(r.status == "ERR:PAYLOAD_MISMATCH");
  }

  SUBCASE("handler rejects the dtype") {
    const DispatchResult r = dispatch(
        registry, make_frame("BAYER_BILINEAR", "rows=4,cols=4,dtype=f32",
                             mosaic_payload(4, 4, 4)));
    CHECK(r.status == "ERR:BAD_HEADER");
  }

  SUBCASE("order above the cap fails the task") {
    std::vector<std::uint8_t> payload;
    for (int i = 0; i < 16; ++i) put_f64_le(payload, 1.0);
    const DispatchResult r = dispatch(
        registry,
        make_frame("LSQ_POLYFIT", "lines=1,pixels=16,order=9", payload));
    CHECK(r.status == "ERR:TASK_FAILED");
    CHECK(r.params.get("msg").find("exceeds") != std::string::npos);
  }

  SUBCASE("non-finite samples fail the task") {
    std::vector<std::uint8_t> payload;
    put_f64_le(payload, 1.0);
    put_f64_le(payload, std::nan(""));
    put_f64_le(payload, 3.0);
    put_f64_le(payload, 4.0);
    const DispatchResult r = dispatch(
        registry,
        make_frame("LSQ_POLYFIT", "lines=1,pixels=4,order=1", payload));
    CHECK(r.status == "ERR:TASK_FAILED");
    CHECK(r.params.get("msg").find("non-finite") != std::string::npos);
  }

  SUBCASE("undersized images fail the task") {
    const DispatchResult r = dispatch(
        registry,
        make_frame("BAYER_BILINEAR", "rows=1,cols=8", mosaic_payload(1, 8, 5)));
    CHECK(r.status == "ERR:TASK_FAILED");
  }
}

TEST_CASE("error messages are sanitized to fit the params slot") {
  wire::ParamMap empty;
  const std::string long_text(500, 'x');
  const std::string cut = sanitize_message(long_text, empty);
  CHECK(cut.size() == wire::kParamsSize - 4);  // "msg=" overhead

  wire::ParamMap crowded;
  crowded.set("key", std::string(180, 'y'));
  const std::string squeezed = sanitize_message(long_text, crowded);
  CHECK(crowded.serialize().size() + 1 + 4 + squeezed.size() <=
        wire::kParamsSize);

  const std::string weird = sanitize_message("a\x01" "b\ttab\x7f", empty);
  CHECK(weird == "a?b?tab?");
}

TEST_CASE("response frames echo only well-formed output names") {
  DispatchResult ok;
  ok.status = "OK";
  ok.payload = {1, 2, 3};
  ok.params.set("bytes", std::uint64_t{3});

  wire::Frame frame = make_response_frame(ok, "result.bin");
  CHECK(frame.header.task_flag == "OK");
  CHECK(frame.header.data_marker == wire::kMarkerData);
  CHECK(frame.header.output_name == "result.bin");
  CHECK(frame.payload == ok.payload);
  // The frame must encode as-is.
  const wire::HeaderBytes bytes = wire::encode_header(frame.header);
  CHECK(wire::decode_header(bytes) == frame.header);

  CHECK(make_response_frame(ok, std::string(31, 'n')).header.output_name ==
        "");
  CHECK(make_response_frame(ok, "bad\nname").header.output_name == "");
  CHECK(make_response_frame(ok, std::string(30, 'n')).header.output_name ==
        std::string(30, 'n'));

  DispatchResult err;
  err.status = "ERR:TASK_FAILED";
  err.params.set("msg", "boom");
  const wire::Frame ef = make_response_frame(err, "result.bin");
  CHECK(ef.header.data_marker == wire::kMarkerNone);
  CHECK(ef.payload.empty());
}

TEST_CASE("dispatch never throws and responses always encode") {
  par::ExecPlan plan{1};
  const TaskRegistry registry = make_builtin_registry(plan, one_device());

  std::mt19937 rng(0xD15EA5E);
  const std::vector<std::string> flags = {"BAYER_BILINEAR", "LSQ_POLYFIT",
                                          "DEVINFO", "WHAT", ""};
  for (int i = 0; i < 500; ++i) {
    wire::Frame frame;
    frame.header.task_flag = (rng() & 1u) != 0
                                 ? flags[rng() % flags.size()]
                                 : testutil::random_printable(rng, 29);
    frame.header.params = testutil::random_printable(rng, 200);
    if ((rng() & 3u) == 0) frame.header.params = "rows=4,cols=4";
    frame.header.output_name = testutil::random_printable(rng, 30);
    if ((rng() & 1u) != 0) {
      frame.header.data_marker = wire::kMarkerData;
      frame.payload.assign(rng() % 64, 0x5A);
    }

    const DispatchResult result = dispatch(registry, frame);
    CHECK((result.status == "OK" || result.status.rfind("ERR:", 0) == 0));
    const wire::Frame response =
        make_response_frame(result, frame.header.output_name);
    CHECK_NOTHROW(wire::encode_header(response.header));
  }
}
