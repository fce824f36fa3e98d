#pragma once

#include <memory>
#include <vector>

#include "gpc/devinfo.hpp"
#include "gpc/parexec.hpp"
#include "gpc/registry.hpp"

// Built-in tasks:
//
//   flag            required params        payload in            payload out
//   --------------  ---------------------  --------------------  -----------
//   BAYER_BILINEAR  rows, cols             rows*cols u16 LE      3 planes u16 LE
//   BAYER_GRADIENT  rows, cols             rows*cols u16 LE      3 planes u16 LE
//   LSQ_POLYFIT     lines, pixels, order   lines*pixels f32/f64  lines*(order+2) f64
//   DEVINFO         (none)                 (none)                XML text
//
// Optional params: phase=RGGB|BGGR|GRBG|GBRG and dtype=u16 for the Bayer
// tasks, dtype=f32|f64 for the polynomial fit.
//
// Device probing happens once when the registry is built; the DEVINFO
// handler serves the cached snapshot, so concurrent requests need no
// locking and replays are byte-identical.

namespace gpc::task {

using DeviceList = std::vector<devinfo::DeviceInfo>;

TaskRegistry make_builtin_registry(const par::ExecPlan& plan,
                                   std::shared_ptr<const DeviceList> devices);

// Probes with HostCpuProber.
TaskRegistry make_builtin_registry(const par::ExecPlan& plan);

}  // namespace gpc::task
