#include <cstring>

#include "doctest.h"
#include "gpc/wire.hpp"
#include "test_util.hpp"

using namespace gpc;
using namespace gpc::wire;
using testutil::thrown_code;

namespace {

HeaderBytes raw_header(const std::string& flag, std::uint8_t marker,
                       const std::string& params, const std::string& name) {
  HeaderBytes raw{};
  std::memcpy(raw.data(), flag.data(), flag.size());
  raw[kMarkerOffset] = marker;
  std::memcpy(raw.data() + kParamsOffset, params.data(), params.size());
  std::memcpy(raw.data() + kOutputNameOffset, name.data(), name.size());
  return raw;
}

}  // namespace

TEST_CASE("header layout constants") {
  CHECK(kHeaderSize == 260);
  CHECK(kTaskFlagSize == 29);
  CHECK(kMarkerOffset == 29);
  CHECK(kParamsOffset == 30);
  CHECK(kParamsSize == 200);
  CHECK(kOutputNameOffset == 230);
  CHECK(kOutputNameSize == 30);
  CHECK(kMarkerData == '+');
}

TEST_CASE("encode places fields at fixed offsets") {
  TaskHeader h;
  h.task_flag = "BAYER_BILINEAR";
  h.data_marker = kMarkerData;
  h.params = "rows=2048,cols=2048,dtype=u16";
  h.output_name = "out.raw";

  const HeaderBytes raw = encode_header(h);
  CHECK(std::memcmp(raw.data(), "BAYER_BILINEAR", 14) == 0);
  CHECK(raw[14] == 0x00);
  CHECK(raw[28] == 0x00);
  CHECK(raw[29] == 0x2B);
  CHECK(std::memcmp(raw.data() + 30, h.params.data(), h.params.size()) == 0);
  CHECK(raw[30 + h.params.size()] == 0x00);
  CHECK(raw[229] == 0x00);
  CHECK(std::memcmp(raw.data() + 230, "out.raw", 7) == 0);
  CHECK(raw[237] == 0x00);
  CHECK(raw[259] == 0x00);
}

TEST_CASE("DEVINFO request header bytes") {
  TaskHeader h;
  h.task_flag = "DEVINFO";
  h.data_marker = kMarkerNone;
  h.output_name = "info.xml";

  const HeaderBytes raw = encode_header(h);
  CHECK(std::memcmp(raw.data(), "DEVINFO", 7) == 0);
  CHECK(raw[7] == 0x00);
  CHECK(raw[29] == 0x00);
  for (std::size_t i = kParamsOffset; i < kOutputNameOffset; ++i)
    CHECK(raw[i] == 0x00);
}

TEST_CASE("decode reads an independently built buffer") {
  const HeaderBytes raw =
      raw_header("BAYER_BILINEAR", 0x2B, "rows=2048,cols=2048,dtype=u16",
                 "out.raw");
  const TaskHeader h = decode_header(raw);
  CHECK(h.task_flag == "BAYER_BILINEAR");
  CHECK(h.data_marker == 0x2B);
  CHECK(h.params == "rows=2048,cols=2048,dtype=u16");
  CHECK(h.output_name == "out.raw");
}

TEST_CASE("decode(encode(h)) is the identity") {
  TaskHeader h;
  h.task_flag = "LSQ_POLYFIT";
  h.data_marker = kMarkerData;
  h.params = "lines=6,pixels=6000,order=3,dtype=f64";
  h.output_name = "fit.bin";
  CHECK(decode_header(encode_header(h)) == h);

  std::mt19937 rng(1234);
  for (int i = 0; i < 500; ++i) {
    TaskHeader r;
    r.task_flag = testutil::random_printable(rng, kTaskFlagSize);
    r.data_marker = (rng() & 1) ? kMarkerData : kMarkerNone;
    r.params = testutil::random_printable(rng, kParamsSize);
    r.output_name = testutil::random_printable(rng, kOutputNameSize);
    CHECK(decode_header(encode_header(r)) == r);
  }
}

TEST_CASE("encode rejects oversize and unprintable fields") {
  TaskHeader h;
  h.task_flag = std::string(30, 'A');
  CHECK(thrown_code([&] { encode_header(h); }) == Errc::FieldTooLong);

  h.task_flag = "OK";
  h.params = std::string(201, 'p');
  CHECK(thrown_code([&] { encode_header(h); }) == Errc::FieldTooLong);

  h.params = "";
  h.output_name = std::string(31, 'n');
  CHECK(thrown_code([&] { encode_header(h); }) == Errc::FieldTooLong);

  h.output_name = "";
  h.task_flag = std::string("BAD\x07FLAG");
  CHECK(thrown_code([&] { encode_header(h); }) == Errc::InvalidCharacter);

  h.task_flag = "OK";
  h.data_marker = 0x2A;
  CHECK(thrown_code([&] { encode_header(h); }) == Errc::BadMarker);
}

TEST_CASE("decode rejects bad markers, padding and characters") {
  HeaderBytes raw = raw_header("DEVINFO", 0x00, "", "x");
  raw[kMarkerOffset] = 0x2A;
  CHECK(thrown_code([&] { decode_header(raw); }) == Errc::BadMarker);

  raw = raw_header("DEVINFO", 0x00, "", "x");
  raw[3] = 0x00;  // hole inside the flag: "DEV\0INFO..."
  CHECK(thrown_code([&] { decode_header(raw); }) == Errc::MalformedPadding);

  raw = raw_header("DEVINFO", 0x00, "", "x");
  raw[kParamsOffset + 100] = 'z';  // content resumes after padding began
  CHECK(thrown_code([&] { decode_header(raw); }) == Errc::MalformedPadding);

  raw = raw_header("DEVINFO", 0x00, "a=1", "x");
  raw[kParamsOffset + 1] = 0x07;  // bell inside content
  CHECK(thrown_code([&] { decode_header(raw); }) == Errc::InvalidCharacter);

  CHECK(thrown_code([&] {
          decode_header(std::span<const std::uint8_t>(raw.data(), 100));
        }) == Errc::Truncated);
}

TEST_CASE("param parse splits, orders and unescapes") {
  const ParamMap p = ParamMap::parse("rows=6,cols=6000,order=3");
  CHECK(p.size() == 3);
  CHECK(p.items()[0].first == "rows");
  CHECK(p.items()[1].first == "cols");
  CHECK(p.items()[2].first == "order");
  CHECK(p.get_uint("rows") == 6);
  CHECK(p.get_uint("cols") == 6000);
  CHECK(p.get_uint("order") == 3);

  const ParamMap q = ParamMap::parse("msg=bad dims; expected 2");
  CHECK(q.get("msg") == "bad dims, expected 2");

  CHECK(ParamMap::parse("").empty());
}

TEST_CASE("param serialize folds commas and round-trips") {
  ParamMap p;
  p.set("msg", "bad dims, expected 2");
  CHECK(p.serialize() == "msg=bad dims; expected 2");
  CHECK(ParamMap::parse(p.serialize()) == p);

  ParamMap ordered;
  ordered.set("zeta", std::uint64_t{1});
  ordered.set("alpha", std::uint64_t{2});
  CHECK(ordered.serialize() == "zeta=1,alpha=2");  // insertion order kept

  // '=' inside a value survives a round trip (split is on the first '=').
  ParamMap eq;
  eq.set("expr", "a=b");
  CHECK(ParamMap::parse(eq.serialize()).get("expr") == "a=b");
}

TEST_CASE("param parse rejects malformed tokens") {
  CHECK(thrown_code([] { ParamMap::parse("rows"); }) == Errc::BadToken);
  CHECK(thrown_code([] { ParamMap::parse("=5"); }) == Errc::BadToken);
  CHECK(thrown_code([] { ParamMap::parse("Rows=5"); }) == Errc::BadToken);
  CHECK(thrown_code([] { ParamMap::parse("9rows=5"); }) == Errc::BadToken);
  CHECK(thrown_code([] { ParamMap::parse("a=1,a=2"); }) == Errc::DuplicateKey);
  CHECK(thrown_code([] { ParamMap::parse("a=1,,b=2"); }) == Errc::BadToken);
  CHECK(thrown_code([] {
          ParamMap::parse(std::string(201, 'x'));
        }) == Errc::FieldTooLong);
}

TEST_CASE("param accessors") {
  const ParamMap p = ParamMap::parse("rows=12,name=frame");
  CHECK(p.has("rows"));
  CHECK(!p.has("cols"));
  CHECK(p.get_or("cols", "7") == "7");
  CHECK(thrown_code([&] { p.get("cols"); }) == Errc::MissingParam);
  CHECK(thrown_code([&] { p.get_uint("name"); }) == Errc::BadValue);

  ParamMap w;
  CHECK(thrown_code([&] { w.set("BadKey", "1"); }) == Errc::BadToken);
  w.set("key", "one");
  w.set("key", "two");  // overwrite, no duplicate
  CHECK(w.size() == 1);
  CHECK(w.get("key") == "two");
}

TEST_CASE("expected payload lengths") {
  ParamMap bayer;
  bayer.set("rows", std::uint64_t{2048});
  bayer.set("cols", std::uint64_t{2048});
  CHECK(expected_payload_len("BAYER_BILINEAR", bayer) == 8388608);
  CHECK(expected_payload_len("BAYER_GRADIENT", bayer) == 8388608);

  ParamMap fit;
  fit.set("lines", std::uint64_t{6});
  fit.set("pixels", std::uint64_t{6000});
  fit.set("dtype", "f64");
  CHECK(expected_payload_len("LSQ_POLYFIT", fit) == 288000);
  fit.set("dtype", "f32");
  CHECK(expected_payload_len("LSQ_POLYFIT", fit) == 144000);

  ParamMap fit_default;  // dtype defaults to f64
  fit_default.set("lines", std::uint64_t{6});
  fit_default.set("pixels", std::uint64_t{6000});
  CHECK(expected_payload_len("LSQ_POLYFIT", fit_default) == 288000);

  CHECK(expected_payload_len("DEVINFO", ParamMap()) == 0);

  CHECK(thrown_code([&] { expected_payload_len("NO_SUCH", bayer); }) ==
        Errc::UnknownTask);

  ParamMap missing;
  missing.set("rows", std::uint64_t{4});
  CHECK(thrown_code([&] { expected_payload_len("BAYER_BILINEAR", missing); }) ==
        Errc::MissingParam);

  ParamMap zero;
  zero.set("rows", std::uint64_t{0});
  zero.set("cols", std::uint64_t{4});
  CHECK(thrown_code([&] { expected_payload_len("BAYER_BILINEAR", zero); }) ==
        Errc::BadValue);

  ParamMap junk;
  junk.set("rows", "four");
  junk.set("cols", std::uint64_t{4});
  CHECK(thrown_code([&] { expected_payload_len("BAYER_BILINEAR", junk); }) ==
        Errc::BadValue);

  ParamMap bad_dtype;
  bad_dtype.set("lines", std::uint64_t{1});
  bad_dtype.set("pixels", std::uint64_t{1});
  bad_dtype.set("dtype", "f16");
  CHECK(thrown_code([&] { expected_payload_len("LSQ_POLYFIT", bad_dtype); }) ==
        Errc::BadValue);

  ParamMap huge;
  huge.set("rows", std::uint64_t{1} << 20);
  huge.set("cols", std::uint64_t{1} << 20);
  CHECK(thrown_code([&] { expected_payload_len("BAYER_BILINEAR", huge); }) ==
        Errc::Overflow);

  // Exactly at the cap passes, one past it overflows.
  ParamMap at_cap;
  at_cap.set("rows", std::uint64_t{1});
  at_cap.set("cols", kMaxPayload / 2);
  CHECK(expected_payload_len("BAYER_BILINEAR", at_cap) == kMaxPayload);
  at_cap.set("cols", kMaxPayload / 2 + 1);
  CHECK(thrown_code([&] { expected_payload_len("BAYER_BILINEAR", at_cap); }) ==
        Errc::Overflow);
}

TEST_CASE("frame round trip through a stream") {
  Frame out;
  out.header.task_flag = "BAYER_GRADIENT";
  out.header.data_marker = kMarkerData;
  out.header.params = "rows=2,cols=3";
  out.header.output_name = "rt.raw";
  out.payload = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};

  MemoryStream pipe;
  write_frame(pipe, out);
  CHECK(pipe.written().size() == kHeaderSize + 12);

  MemoryStream reader(pipe.written());
  const Frame in = read_frame(reader);
  CHECK(in == out);
}

TEST_CASE("read_frame reports truncated streams with got/want counts") {
  std::vector<std::uint8_t> short_input(100, 'A');
  MemoryStream stream(std::move(short_input));
  try {
    read_frame(stream);
    FAIL("expected Truncated");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Truncated);
    CHECK(std::string(e.what()).find("100") != std::string::npos);
    CHECK(std::string(e.what()).find("260") != std::string::npos);
  }
}

TEST_CASE("read_frame rejects marker/length contradictions") {
  // Marker promises data but DEVINFO expects none.
  Frame devinfo;
  devinfo.header.task_flag = "DEVINFO";
  devinfo.header.data_marker = kMarkerData;
  MemoryStream a;
  a.write_all(encode_header(devinfo.header));
  MemoryStream ra(a.written());
  CHECK(thrown_code([&] { read_frame(ra); }) == Errc::PayloadMismatch);

  // No marker but params imply a payload.
  Frame bayer;
  bayer.header.task_flag = "BAYER_BILINEAR";
  bayer.header.data_marker = kMarkerNone;
  bayer.header.params = "rows=2,cols=2";
  MemoryStream b;
  b.write_all(encode_header(bayer.header));
  MemoryStream rb(b.written());
  CHECK(thrown_code([&] { read_frame(rb); }) == Errc::PayloadMismatch);
}

TEST_CASE("write_frame validates marker against payload") {
  Frame f;
  f.header.task_flag = "DEVINFO";
  f.header.data_marker = kMarkerData;  // but no payload
  MemoryStream s;
  CHECK(thrown_code([&] { write_frame(s, f); }) == Errc::PayloadMismatch);

  f.header.data_marker = kMarkerNone;
  f.payload = {1};
  CHECK(thrown_code([&] { write_frame(s, f); }) == Errc::PayloadMismatch);
}

TEST_CASE("response sizer uses the bytes param") {
  TaskHeader ok;
  ok.task_flag = "OK";
  ok.data_marker = kMarkerData;
  ok.params = "rows=2048,cols=2048,planes=3,bytes=25165824";
  CHECK(response_payload_len(ok) == 25165824);

  TaskHeader err;
  err.task_flag = "ERR:UNKNOWN_TASK";
  err.data_marker = kMarkerNone;
  err.params = "msg=no such task";
  CHECK(response_payload_len(err) == 0);

  TaskHeader missing;
  missing.task_flag = "OK";
  missing.data_marker = kMarkerData;
  missing.params = "rows=1";
  CHECK(thrown_code([&] { response_payload_len(missing); }) ==
        Errc::MissingParam);

  TaskHeader oversize;
  oversize.task_flag = "OK";
  oversize.data_marker = kMarkerData;
  oversize.params = "bytes=1073741825";
  CHECK(thrown_code([&] { response_payload_len(oversize); }) ==
        Errc::Overflow);
}

TEST_CASE("decode survives arbitrary buffers") {
  std::mt19937 rng(987654);
  std::uniform_int_distribution<int> byte_dist(0, 255);

  int decoded = 0, rejected = 0;
  for (int i = 0; i < 2000; ++i) {
    HeaderBytes raw;
    for (auto& b : raw) b = static_cast<std::uint8_t>(byte_dist(rng));
    try {
      (void)decode_header(raw);
      ++decoded;
    } catch (const Error&) {
      ++rejected;
    }
  }
  CHECK(decoded + rejected == 2000);
  CHECK(rejected > 0);  // random bytes are overwhelmingly invalid

  // Single-byte mutations of a valid header must also never escape Error.
  const HeaderBytes base =
      raw_header("BAYER_BILINEAR", 0x2B, "rows=4,cols=4", "a.raw");
  std::uniform_int_distribution<std::size_t> pos_dist(0, kHeaderSize - 1);
  for (int i = 0; i < 2000; ++i) {
    HeaderBytes raw = base;
    raw[pos_dist(rng)] = static_cast<std::uint8_t>(byte_dist(rng));
    try {
      (void)decode_header(raw);
    } catch (const Error&) {
    }
  }
}
