#include "support.hpp"

#include "kldwave/errors.hpp"
#include "kldwave/scenario_io.hpp"

#include <filesystem>
#include <fstream>

using namespace kldwave;
using namespace kldwave::test;

TEST_CASE("matrix encoding") {
    const Json j = Json::parse(R"([[1, [0, 2]], [[3, -1], 4.5]])");
    const ComplexMatrix m = matrix_from_json(j, "m");
    CHECK(m(0, 1) == Complex(0, 2));
    CHECK(m(1, 0) == Complex(3, -1));
    CHECK(m(1, 1) == Complex(4.5, 0));
    CHECK((matrix_from_json(matrix_to_json(m), "m") - m).norm() == 0.0);
    CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1, 2], [3]]"), "m"), ConfigError);
    CHECK_THROWS_AS(matrix_from_json(Json::parse("[[\"x\"]]"), "m"), ConfigError);
    CHECK_THROWS_AS(hermitian_from_json(Json::parse("[[1, 2], [0, 1]]"), "m"), InputError);
}

TEST_CASE("scenario round trips") {
    const SensingScenario s = small_scenario(2, 3, 4, 1);
    const SensingScenario back = sensing_from_json(to_json(s));
    CHECK(back.n_rx == 3);
    CHECK((back.r_target.matrix() - s.r_target.matrix()).norm() == 0.0);
    CHECK((back.r_noise.matrix() - s.r_noise.matrix()).norm() == 0.0);

    const Waveform w = init_waveform(s, 1);
    CHECK((waveform_from_json(to_json(w)).x - w.x).norm() == 0.0);

    RaGeneratorConfig g;
    g.n_devices = 2;
    const RandomAccessScenario ra = generate_random_access(g, 1);
    const RandomAccessScenario ra_back = random_access_from_json(to_json(ra));
    CHECK(ra_back.priors == ra.priors);
    CHECK(ra_back.power_budgets == ra.power_budgets);
    CHECK((ra_back.r_device[1].matrix() - ra.r_device[1].matrix()).norm() == 0.0);
    const WaveformSet xs = init_waveform_set(ra, 2);
    CHECK((waveform_set_from_json(to_json(xs)).x[1].x - xs.x[1].x).norm() == 0.0);

    const IsacScenario isac = make_isac_scenario(s, 2, 5.0, 0.25, 3);
    const IsacScenario isac_back = isac_from_json(to_json(isac));
    CHECK(isac_back.rho == 0.25);
    CHECK((isac_back.h_c - isac.h_c).norm() == 0.0);
}

TEST_CASE("parsers reject unknown keys and invalid scenarios") {
    const SensingScenario s = small_scenario(2, 2, 3, 1);
    Json j = to_json(s);
    j["extra"] = 1;
    CHECK_THROWS_AS(sensing_from_json(j), ConfigError);
    j = to_json(s);
    j["r_noise"] = matrix_to_json(ComplexMatrix::Zero(3, 3));
    CHECK_THROWS_AS(sensing_from_json(j), SingularNoise);
    j = to_json(s);
    j.erase("n_tx");
    CHECK_THROWS_AS(sensing_from_json(j), ConfigError);
}

TEST_CASE("file helpers") {
    const auto dir = std::filesystem::temp_directory_path() / "kldwave_io_test";
    std::filesystem::create_directories(dir);
    write_file_atomic(dir / "a.json", "{\"x\": [1, 2]}");
    CHECK(read_json_file(dir / "a.json")["x"][1] == 2);
    CHECK_FALSE(std::filesystem::exists(dir / "a.json.tmp"));
    std::ofstream(dir / "bad.json") << "{not json";
    CHECK_THROWS_AS(read_json_file(dir / "bad.json"), ConfigError);
    CHECK_THROWS_AS(read_json_file(dir / "missing.json"), ConfigError);
    std::filesystem::remove_all(dir);
}
