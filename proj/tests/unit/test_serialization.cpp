#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "documents.hpp"
#include "hcmap/serialization.hpp"

using namespace hcmap;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidArgument;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "hcmap_test_serialization";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("series csv shape and header detection") {
  const auto plain = parse_series_csv("a,1,2,3\nb,4,5,6\n");
  CHECK(plain.size() == 2);
  CHECK(plain.length() == 3);
  CHECK(plain.values(1, 2) == 6.0);
  const auto headed = parse_series_csv("id,t0,t1,t2\r\na,1,2,3\r\nb,4,5,6\r\n");
  CHECK(headed == plain);
  CHECK(parse_series_csv(format_series_csv(plain)) == plain);
}

TEST_CASE("series csv errors") {
  CHECK(code_of([] { parse_series_csv("a,1,2\na,3,4\n"); }) == Errc::DuplicateIds);
  CHECK(code_of([] { parse_series_csv("a,1,2\nb,3\n"); }) == Errc::RaggedRows);
  CHECK(code_of([] { parse_series_csv("a,1,2\nb,3,x\n"); }) == Errc::NonNumericValue);
  CHECK(code_of([] { parse_series_csv(""); }) == Errc::RaggedRows);
  try {
    parse_series_csv("a,1,2\nb,3,x\n");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK(code_of([] { load_series_csv(scratch("missing.csv")); }) == Errc::IoError);
}

TEST_CASE("distance csv") {
  const auto d = parse_distance_csv(",a,b,c\na,0,1,2\nb,1,0,3\nc,2,3,0\n");
  CHECK(d.ids == std::vector<std::string>{"a", "b", "c"});
  CHECK(d.d(2, 1) == 3.0);
  CHECK(parse_distance_csv(format_distance_csv(d)) == d);

  const auto nearly = parse_distance_csv(",a,b\na,0,1\nb,1.000000000001,0\n");
  CHECK(nearly.d(0, 1) == nearly.d(1, 0));
  CHECK(nearly.d(0, 1) == doctest::Approx(1.0));

  CHECK(code_of([] { parse_distance_csv(",a,b\na,0,1\nb,1.000001,0\n"); }) == Errc::AsymmetryBeyondTolerance);
  CHECK(code_of([] { parse_distance_csv(",a,b\na,0.5,1\nb,1,0\n"); }) == Errc::NonzeroDiagonal);
  CHECK(code_of([] { parse_distance_csv(",a,b\na,0,-1\nb,-1,0\n"); }) == Errc::NegativeDistance);
  CHECK(code_of([] { parse_distance_csv(",a,b,c\na,0,1,2\nb,1,0,3\n"); }) == Errc::NotSquare);
  CHECK(code_of([] { parse_distance_csv(",a,a\na,0,1\na,1,0\n"); }) == Errc::DuplicateIds);
}

TEST_CASE("dendrogram round trip through a file") {
  gen::Rng rng(1);
  const Document doc = linkage(gen::random_distances(7, rng), Linkage::Complete);
  const auto path = scratch("dendro.json");
  write_json(path, doc);
  CHECK(read_json(path) == doc);
  CHECK(read_json_as<Dendrogram>(path) == std::get<Dendrogram>(doc));
  CHECK(code_of([&] { read_json_as<TreeDocument>(path); }) == Errc::MalformedDocument);
}

TEST_CASE("envelope layout") {
  const Document doc = Dendrogram{2, {{0, 1, 0.5, 2}}};
  const std::string text = dump_document(doc);
  CHECK(text.rfind("{\n \"schema_version\": \"1\",\n \"kind\": \"dendrogram\",\n \"payload\"", 0) == 0);
  CHECK(text.back() == '\n');
}

TEST_CASE("malformed and foreign documents") {
  gen::Rng rng(2);
  const std::string text = dump_document(linkage(gen::random_distances(5, rng), Linkage::Average));
  CHECK(code_of([&] { parse_document(text.substr(0, text.size() / 2)); }) == Errc::MalformedDocument);

  const auto path = scratch("truncated.json");
  std::ofstream(path) << text.substr(0, text.size() / 3);
  CHECK(code_of([&] { read_json(path); }) == Errc::MalformedDocument);

  auto future = to_json(parse_document(text));
  future["schema_version"] = "2";
  CHECK(code_of([&] { from_json(future); }) == Errc::SchemaVersionMismatch);

  auto bad_kind = to_json(parse_document(text));
  bad_kind["kind"] = "poem";
  CHECK(code_of([&] { from_json(bad_kind); }) == Errc::MalformedDocument);

  auto broken = to_json(parse_document(text));
  broken["payload"]["merges"][1]["node"] = 99;
  CHECK(code_of([&] { from_json(broken); }) == Errc::MalformedDocument);

  CHECK(code_of([] { parse_document("[1, 2]"); }) == Errc::MalformedDocument);
}

TEST_CASE("every kind round trips with identical bytes") {
  gen::Rng rng(77);
  for (int kind = 0; kind < 6; ++kind)
    for (int trial = 0; trial < 25; ++trial) {
      const Document doc = gen::random_document(static_cast<DocumentKind>(kind), rng);
      const std::string text = dump_document(doc);
      const Document back = parse_document(text);
      CHECK_MESSAGE(back == doc, "kind " << kind << "\n" << text);
      CHECK(dump_document(back) == text);
    }
}

TEST_CASE("tree documents align by label") {
  gen::Rng rng(3);
  TreeDocument a{{"p", "q", "r", "s"}, Linkage::Average, linkage(gen::random_distances(4, rng), Linkage::Average)};
  TreeDocument b = a;
  b.labels = {"s", "r", "q", "p"};
  const auto aligned = align_labels(a, b);
  CHECK(aligned.labels == a.labels);
  // leaf "p" was leaf 3 in b and is leaf 0 after alignment
  const auto before = node_members(b.dendrogram), after = node_members(aligned.dendrogram);
  for (std::size_t node = 4; node < 7; ++node) {
    std::vector<std::string> x, y;
    for (auto i : before[node]) x.push_back(b.labels[i]);
    for (auto i : after[node]) y.push_back(aligned.labels[i]);
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    CHECK(x == y);
  }
  b.labels[0] = "t";
  CHECK(code_of([&] { align_labels(a, b); }) == Errc::ElementSetMismatch);
}

TEST_CASE("linkage names") {
  CHECK(parse_linkage("single") == Linkage::Single);
  CHECK(to_string(Linkage::Complete) == "complete");
  CHECK(code_of([] { parse_linkage("ward"); }) == Errc::InvalidArgument);
}
