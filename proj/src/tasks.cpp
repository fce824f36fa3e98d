#include "gpc/tasks.hpp"

#include "gpc/demosaic.hpp"
#include "gpc/lsq.hpp"

namespace gpc::task {

namespace {

using img::BayerImage;
using img::RgbImage;

TaskOutput run_demosaic(const wire::ParamMap& params,
                        std::span<const std::uint8_t> payload,
                        const par::ExecPlan& plan, bool gradient) {
  const std::uint64_t rows = params.get_uint("rows");
  const std::uint64_t cols = params.get_uint("cols");
  const std::string dtype = params.get_or("dtype", "u16");
  if (dtype != "u16") fail(Errc::BadValue, "dtype=" + dtype);
  const img::CfaPhase phase =
      img::phase_from_string(params.get_or("phase", "RGGB"));

  const BayerImage image = img::bayer_from_le_bytes(
      static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), phase,
      payload);
  const RgbImage rgb = gradient ? img::demosaic_gradient(image, plan)
                                : img::demosaic_bilinear(image, plan);

  TaskOutput out;
  out.params.set("rows", rows);
  out.params.set("cols", cols);
  out.params.set("planes", std::uint64_t{3});
  out.payload = img::rgb_to_le_bytes(rgb);
  return out;
}

TaskOutput run_polyfit(const wire::ParamMap& params,
                       std::span<const std::uint8_t> payload,
                       const par::ExecPlan& plan) {
  const std::uint64_t lines = params.get_uint("lines");
  const std::uint64_t pixels = params.get_uint("pixels");
  const std::uint64_t order = params.get_uint("order");
  if (order > static_cast<std::uint64_t>(lsq::kMaxOrder))
    fail(Errc::OrderTooHigh, "order " + std::to_string(order) + " exceeds " +
                                 std::to_string(lsq::kMaxOrder));
  const lsq::Dtype dtype =
      lsq::dtype_from_string(params.get_or("dtype", "f64"));

  const lsq::ScanLineSet set = lsq::scanlines_from_le_bytes(
      static_cast<std::size_t>(lines), static_cast<std::size_t>(pixels), dtype,
      payload);
  const std::vector<lsq::LineFit> fits =
      lsq::batch_fit(set, static_cast<int>(order), plan);

  TaskOutput out;
  out.params.set("lines", lines);
  out.params.set("order", order);
  out.payload = lsq::fits_to_le_bytes(fits, static_cast<int>(order));
  return out;
}

}  // namespace

TaskRegistry make_builtin_registry(const par::ExecPlan& plan,
                                   std::shared_ptr<const DeviceList> devices) {
  TaskRegistry registry;

  const auto sized_by = [](std::string flag) {
    return [flag = std::move(flag)](const wire::ParamMap& params) {
      return wire::expected_payload_len(flag, params);
    };
  };

  registry.add({
      .flag = "BAYER_BILINEAR",
      .required_params = {"rows", "cols"},
      .payload_rule = sized_by("BAYER_BILINEAR"),
      .handler =
          [plan](const wire::ParamMap& params,
                 std::span<const std::uint8_t> payload) {
            return run_demosaic(params, payload, plan, false);
          },
  });

  registry.add({
      .flag = "BAYER_GRADIENT",
      .required_params = {"rows", "cols"},
      .payload_rule = sized_by("BAYER_GRADIENT"),
      .handler =
          [plan](const wire::ParamMap& params,
                 std::span<const std::uint8_t> payload) {
            return run_demosaic(params, payload, plan, true);
          },
  });

  registry.add({
      .flag = "LSQ_POLYFIT",
      .required_params = {"lines", "pixels", "order"},
      .payload_rule = sized_by("LSQ_POLYFIT"),
      .handler =
          [plan](const wire::ParamMap& params,
                 std::span<const std::uint8_t> payload) {
            return run_polyfit(params, payload, plan);
          },
  });

  registry.add({
      .flag = "DEVINFO",
      .required_params = {},
      .payload_rule = [](const wire::ParamMap&) { return std::uint64_t{0}; },
      .handler =
          [devices](const wire::ParamMap&, std::span<const std::uint8_t>) {
            TaskOutput out;
            const std::string xml = devinfo::to_xml(*devices);
            out.params.set("devices",
                           static_cast<std::uint64_t>(devices->size()));
            out.payload.assign(xml.begin(), xml.end());
            return out;
          },
  });

  return registry;
}

TaskRegistry make_builtin_registry(const par::ExecPlan& plan) {
  auto devices = std::make_shared<DeviceList>(devinfo::HostCpuProber().probe());
  return make_builtin_registry(plan, devices);
}

}  // namespace gpc::task
