#include <doctest.h>

#include <sstream>

#include "bandsleep/cell.hpp"
#include "bandsleep/errors.hpp"

using namespace bandsleep;

TEST_CASE("default cell matches the shipped four-band layout") {
  CellConfig cell = default_cell();
  REQUIRE(cell.band_count() == 4);
  CHECK(cell.bands()[0].label == "800MHz");
  CHECK(cell.bands()[1].label == "1800MHz");
  CHECK(cell.bands()[2].label == "2100MHz");
  CHECK(cell.bands()[3].label == "2600MHz");
  CHECK(cell.bands()[0].prbs_per_tti == 50);
  CHECK(cell.bands()[1].prbs_per_tti == 100);
  CHECK(cell.bands()[2].prbs_per_tti == 75);
  CHECK(cell.bands()[3].prbs_per_tti == 75);
  CHECK(cell.bands()[0].power_weight == doctest::Approx(1.0));
  CHECK(cell.bands()[1].power_weight == doctest::Approx(2.0));
  CHECK(cell.bands()[2].power_weight == doctest::Approx(1.5));
  CHECK(cell.bands()[3].power_weight == doctest::Approx(1.5));
  CHECK(cell.realloc_ms() == 20);
  CHECK(cell.activation_ms() == 600000);
  CHECK(cell.windows_per_period() == 30000);
  CHECK(cell.total_prbs_per_tti() == 300);
}

TEST_CASE("prefix capacity accumulates the lowest bands") {
  CellConfig cell = default_cell();
  CHECK(cell.prefix_capacity(0) == 0);
  CHECK(cell.prefix_capacity(1) == 50);
  CHECK(cell.prefix_capacity(2) == 150);
  CHECK(cell.prefix_capacity(3) == 225);
  CHECK(cell.prefix_capacity(4) == 300);
}

TEST_CASE("band_index resolves labels and rejects unknowns") {
  CellConfig cell = default_cell();
  CHECK(cell.band_index("800MHz") == 0);
  CHECK(cell.band_index("2600MHz") == 3);
  CHECK(cell.band_index("900MHz") == -1);
}

TEST_CASE("with_activation_ms keeps bands and validates the multiple") {
  CellConfig cell = default_cell().with_activation_ms(60000);
  CHECK(cell.activation_ms() == 60000);
  CHECK(cell.windows_per_period() == 3000);
  CHECK(cell.band_count() == 4);
  CHECK_THROWS_AS(default_cell().with_activation_ms(30), ConfigError);  // not a multiple of 20
  CHECK_THROWS_AS(default_cell().with_activation_ms(0), ConfigError);
}

TEST_CASE("cell construction rejects inconsistent configs") {
  CHECK_THROWS_AS(CellConfig({}, 20, 600000), ConfigError);
  CHECK_THROWS_AS(CellConfig({{1, "a", 0, 1.0}}, 20, 600000), ConfigError);   // zero PRBs
  CHECK_THROWS_AS(CellConfig({{1, "a", 10, 0.0}}, 20, 600000), ConfigError);  // zero power
  CHECK_THROWS_AS(CellConfig({{1, "", 10, 1.0}}, 20, 600000), ConfigError);   // empty label
  CHECK_THROWS_AS(CellConfig({{1, "a", 10, 1.0}, {2, "a", 10, 1.0}}, 20, 600000),
                  ConfigError);  // duplicate label
  CHECK_THROWS_AS(CellConfig({{1, "a", 10, 1.0}}, 0, 600000), ConfigError);
  CHECK_THROWS_AS(CellConfig({{1, "a", 10, 1.0}}, 20, 610), ConfigError);  // 610 % 20 != 0
}

TEST_CASE("cell config survives a JSON round trip") {
  CellConfig cell = default_cell().with_activation_ms(180000);
  std::string json = cell_config_to_json(cell);
  std::istringstream in(json);
  CellConfig back = read_cell_config(in);
  REQUIRE(back.band_count() == cell.band_count());
  for (int f = 0; f < cell.band_count(); ++f) {
    CHECK(back.bands()[f].label == cell.bands()[f].label);
    CHECK(back.bands()[f].prbs_per_tti == cell.bands()[f].prbs_per_tti);
    CHECK(back.bands()[f].power_weight == cell.bands()[f].power_weight);
  }
  CHECK(back.realloc_ms() == cell.realloc_ms());
  CHECK(back.activation_ms() == cell.activation_ms());
  CHECK(cell_config_to_json(back) == json);
}

TEST_CASE("cell config JSON parse errors carry the source name") {
  std::istringstream bad("not json at all");
  CHECK_THROWS_AS(read_cell_config(bad, "cell.json"), ParseError);
  std::istringstream missing(R"({"realloc_ms":20})");
  CHECK_THROWS_AS(read_cell_config(missing, "cell.json"), ParseError);
}
