// Writes the synthetic behavioral fixture used by the examples in data/.

#include <ransomtrace/fixture_gen.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Generate a synthetic fixture chain and dataset", "make_fixture"};
    std::string out = "fixture";
    std::uint64_t seed = 7;
    app.add_option("--out", out, "output directory");
    app.add_option("--seed", seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    const auto fx = ransomtrace::fixture::behavioral_fixture(seed);
    ransomtrace::fixture::write_fixture_dir(fx, out);
    std::cerr << "wrote " << fx.txs.size() << " txs, " << fx.addresses.size() << " addresses to " << out << "\n";
    return 0;
}
