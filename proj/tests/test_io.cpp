#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "vnmix/io.hpp"
#include "vnmix/oracle.hpp"

using namespace vnmix;
using nlohmann::json;

namespace {
std::string parse_error_path(const json& j) {
  try {
    io::functional_from_json(j);
  } catch (const io::ParseError& e) {
    return e.path();
  }
  return "<none>";
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "vnmix_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}
}  // namespace

TEST(Io, FunctionalRoundtrip) {
  const auto w = oracle::random_hermitian(AlgebraSpec::validate({2, 1, 3}), 3);
  const auto j = json::parse(io::to_json(w).dump());
  const auto back = io::functional_from_json(j);
  EXPECT_EQ(back.algebra(), w.algebra());
  EXPECT_LT(back.max_entry_difference(w), 1e-15);
}

TEST(Io, ChannelRoundtrips) {
  const auto a = AlgebraSpec::validate({2, 3});
  const auto phi = random_elementary(a, 3, 4);
  const auto kj = json::parse(io::to_json(phi).dump());
  const auto kf = io::channel_from_json(kj);
  ASSERT_TRUE(kf.kraus);
  EXPECT_LT(choi_of(*kf.kraus).max_difference(choi_of(phi)), 1e-15);

  const auto cj = json::parse(io::to_json(choi_of(phi)).dump());
  const auto cf = io::channel_from_json(cj);
  ASSERT_TRUE(cf.choi);
  EXPECT_LT(choi_of(cf.as_kraus()).max_difference(choi_of(phi)), 1e-9);
  EXPECT_LT(cf.as_choi().max_difference(kf.as_choi()), 1e-15);
}

TEST(Io, RealEntriesAccepted) {
  const json j = {{"algebra", {{"blocks", {2}}}}, {"densities", {{{0.5, 0.0}, {0.0, 0.5}}}}};
  const auto w = io::functional_from_json(j);
  EXPECT_TRUE(w.is_state(1e-12));
}

TEST(Io, FieldPaths) {
  json j = {{"algebra", {{"blocks", {2}}}}, {"densities", {{{0.5, 0.0}, {0.0, 0.5}}}}};
  json bad = j;
  bad.erase("densities");
  EXPECT_EQ(parse_error_path(bad), "densities");
  bad = j;
  bad["algebra"]["blocks"][0] = 0;
  EXPECT_EQ(parse_error_path(bad), "algebra.blocks");
  bad = j;
  bad["algebra"]["blocks"][0] = "two";
  EXPECT_EQ(parse_error_path(bad), "algebra.blocks[0]");
  bad = j;
  bad["densities"][0][1] = json::array({0.0});
  EXPECT_EQ(parse_error_path(bad), "densities[0][1]");
  bad = j;
  bad["densities"][0][1][0] = json::array({0.0, "x"});
  EXPECT_EQ(parse_error_path(bad), "densities[0][1][0][1]");
  EXPECT_EQ(parse_error_path(json::array()), "<root>");
}

TEST(Io, RejectsNonHermitianDensity) {
  const json j = {{"algebra", {{"blocks", {2}}}}, {"densities", {{{0.5, 0.1}, {0.0, 0.5}}}}};
  try {
    io::functional_from_json(j);
    FAIL() << "expected an error";
  } catch (const io::ParseError& e) {
    EXPECT_EQ(e.path(), "densities[0]");
    EXPECT_NE(std::string(e.what()).find("not hermitian"), std::string::npos);
  }
}

TEST(Io, ChannelNeedsExactlyOneForm) {
  const json base = {{"algebra", {{"blocks", {1}}}}};
  EXPECT_THROW(io::channel_from_json(base), io::ParseError);
  json both = base;
  both["kraus"] = json::array({json::array({json::array({json::array({1.0})})})});
  both["choi_blocks"] = json::array({json::array({json::array({1.0})})});
  EXPECT_THROW(io::channel_from_json(both), io::ParseError);
  both.erase("choi_blocks");
  EXPECT_NO_THROW(io::channel_from_json(both));
}

TEST(Io, DecisionJson) {
  const auto a = AlgebraSpec::validate({2, 2});
  const auto w = Functional::tracial(a, {0.5, 0.5});
  const auto r = Functional::tracial(a, {0.7, 0.3});
  const auto j = io::to_json(check_more_mixed(w, r));
  EXPECT_EQ(j["verdict"], "no");
  EXPECT_EQ(j["certificate"]["kind"], "ideal");
  EXPECT_EQ(j["certificate"]["ideal"], json::array({1}));
  EXPECT_EQ(j["theorem"], kIdealCriterion);
  EXPECT_TRUE(io::to_json(check_more_mixed(w, w))["certificate"].is_null());
}

TEST(Io, AtomicWriteAndRead) {
  const auto path = scratch("w.json");
  const auto w = oracle::random_state(AlgebraSpec::validate({3}), 2);
  io::write_file_atomic(path.string(), io::dump(io::to_json(w)));
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  EXPECT_LT(io::read_functional(path.string()).max_entry_difference(w), 1e-15);
  io::write_file_atomic(path.string(), "{\"algebra\": ");
  try {
    io::read_functional(path.string());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("malformed JSON"), std::string::npos);
  }
  EXPECT_THROW(io::read_functional((path.parent_path() / "missing.json").string()), Error);
  EXPECT_THROW(io::write_file_atomic((path.parent_path() / "no_dir" / "x.json").string(), "{}"), Error);
}
