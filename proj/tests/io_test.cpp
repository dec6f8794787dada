#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "hypersketch/cascade.hpp"
#include "hypersketch/errors.hpp"
#include "hypersketch/harness.hpp"
#include "hypersketch/io.hpp"
#include "hypersketch/planner.hpp"

using namespace hypersketch;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

SketchBundle small_bundle(Mode mode) {
  const auto set = mode == Mode::Sphere ? gen_sphere(5, 12, 0.3, 42)
                                        : gen_ball(5, 12, 0.25, 0.3, 42);
  auto plan = make_plan(set, 0.35, 777);
  plan.dims.back() = 512;
  if (plan.dims.size() > 1) plan.dims.front() = 2048;
  return sketch_set(set, plan, 1);
}

}  // namespace

TEST_CASE("crc32 reference vector") {
  const char msg[] = "123456789";
  CHECK(crc32(msg, 9) == 0xCBF43926u);
  CHECK(crc32(msg, 0) == 0x00000000u);
}

TEST_CASE("point files round-trip exactly") {
  const auto set = gen_ball(7, 5, 0.3, 0.2, 3);
  const auto path = temp_path("hsk_points_test.txt");
  write_point_file(path, set);
  const auto back = read_point_file(path);
  CHECK(back.mode == set.mode);
  CHECK(back.n == set.n);
  CHECK(back.d == set.d);
  CHECK(back.data == set.data);  // bitwise round trip through %.17g
  std::remove(path.c_str());
}

TEST_CASE("point file parse errors carry line numbers") {
  const auto path = temp_path("hsk_points_bad.txt");
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("2 3 sphere\n1 0 0\n0.5 bad 0\n", f);
    std::fclose(f);
  }
  try {
    read_point_file(path);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("sketch serialization round-trips byte for byte") {
  for (Mode mode : {Mode::Sphere, Mode::Ball}) {
    const auto bundle = small_bundle(mode);
    const auto bytes = serialize_sketch(bundle);
    const auto back = deserialize_sketch(bytes);
    CHECK(back.plan.mode == bundle.plan.mode);
    CHECK(back.plan.n == bundle.plan.n);
    CHECK(back.plan.dims == bundle.plan.dims);
    CHECK(back.plan.epsilon == bundle.plan.epsilon);
    CHECK(back.plan.master_seed == bundle.plan.master_seed);
    CHECK(back.quantized_norms == bundle.quantized_norms);
    for (std::size_t i = 0; i < bundle.sketches.size(); ++i) {
      CHECK(back.sketches[i] == bundle.sketches[i]);
    }
    CHECK(serialize_sketch(back) == bytes);
  }
}

TEST_CASE("payload size matches the header arithmetic") {
  // sphere, n = 100, N = 4096: payload is exactly 100 * 64 * 8 bytes.
  SketchBundle bundle;
  bundle.plan.mode = Mode::Sphere;
  bundle.plan.n = 100;
  bundle.plan.d = 4;
  bundle.plan.levels = 1;
  bundle.plan.dims = {4096};
  bundle.plan.epsilon = 0.2;
  for (int i = 0; i < 100; ++i) bundle.sketches.emplace_back(4096);
  const auto bytes = serialize_sketch(bundle);
  const std::size_t header = 8 + 2 + 1 + 8 + 8 + 2 + 8 * 5 + 8 + 8;  // magic..dims,norm_step
  CHECK(bytes.size() == header + 100 * 64 * 8 + 4);
}

TEST_CASE("single-bit corruption is caught by the CRC") {
  const auto bundle = small_bundle(Mode::Sphere);
  auto bytes = serialize_sketch(bundle);
  for (std::size_t pos : {std::size_t{9}, bytes.size() / 2, bytes.size() - 5}) {
    auto corrupted = bytes;
    corrupted[pos] ^= std::byte{0x10};
    CHECK_THROWS_AS(deserialize_sketch(corrupted), DataIntegrityError);
  }
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(deserialize_sketch(truncated), DataIntegrityError);
}

TEST_CASE("sketch files round-trip through disk") {
  const auto bundle = small_bundle(Mode::Ball);
  const auto path = temp_path("hsk_sketch_test.bin");
  write_sketch_file(path, bundle);
  const auto back = read_sketch_file(path);
  CHECK(serialize_sketch(back) == serialize_sketch(bundle));
  std::remove(path.c_str());
}

TEST_CASE("plan dump lists every field") {
  const auto set = gen_sphere(10, 32, 0.3, 12);
  const auto plan = make_plan(set, 0.3, 9);
  const auto text = plan_to_text(plan);
  for (const char* key : {"mode = ", "n = ", "d = ", "epsilon = ", "eps_working = ",
                          "min_dist = ", "r = ", "min_sq_norm = ", "levels = ", "delta = ",
                          "dims =", "N = ", "norm_step = ", "norm_bits = ", "master_seed = ",
                          "n_constant = ", "bit_budget = "}) {
    CHECK(text.find(key) != std::string::npos);
  }
}
