#include "test_util.hpp"

#include <ransomtrace/address_codec.hpp>
#include <ransomtrace/dataset.hpp>
#include <ransomtrace/fixture_gen.hpp>
#include <ransomtrace/store.hpp>

#include <gtest/gtest.h>

using namespace ransomtrace;

namespace {

DatasetEntry entry(const std::string& addr, const std::string& family, UnixSeconds created, std::uint64_t total,
                   std::uint64_t balance)
{
    DatasetEntry e;
    e.address.encoded = addr;
    e.address.family = family;
    e.address.script_type = codec::classify(addr);
    e.address.created_at = created;
    e.total_received = SatoshiAmount(total);
    e.balance = SatoshiAmount(balance);
    return e;
}

} // namespace

TEST(DatasetJson, EmptyExport) { EXPECT_EQ(export_dataset_json({}), "{\n  \"addresses\": []\n}\n"); }

TEST(DatasetJson, ExactLayout)
{
    auto e = entry("1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa", "NetWalker", 1622548800, 150'000'000, 0);
    e.address.category = ActorCategory::RaaS;
    EXPECT_EQ(export_dataset_json({e}),
              "{\n"
              "  \"addresses\": [\n"
              "    {\n"
              "      \"address\": \"1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa\",\n"
              "      \"family\": \"NetWalker\",\n"
              "      \"category\": \"raas\",\n"
              "      \"script_type\": \"p2pkh\",\n"
              "      \"created_at\": \"2021-06-01T12:00:00Z\",\n"
              "      \"total_received_sat\": 150000000,\n"
              "      \"balance_sat\": 0\n"
              "    }\n"
              "  ]\n"
              "}\n");
}

TEST(DatasetJson, OrderingExclusionAndRoundTrip)
{
    auto a = entry("3J98t1WpEZ73CNmQviecrnyiWrnqRhWNLy", "Ryuk", 200, 5, 5);
    auto b = entry("1BvBMSEYstWetqTFn5Au4m4GFg7xJaNVN2", "SamSam", 100, 7, 1);
    auto c = entry("1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa", "SamSam", 200, 9, 0);
    auto x = entry("bc1qar0srrr7xfkvy5l643lydnw9re59gtzzwf5mdq", "Ryuk", 50, 1, 1);
    x.address.excluded = "seized-silkroad";
    const auto text = export_dataset_json({a, x, b, c});
    const CategoryRegistry reg({"Ryuk"});
    const auto back = parse_dataset_json(text, reg);
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(back[0].address.encoded, b.address.encoded);
    EXPECT_EQ(back[1].address.encoded, c.address.encoded);
    EXPECT_EQ(back[2].address.encoded, a.address.encoded);
    EXPECT_EQ(export_dataset_json(back), text);
}

TEST(DatasetJson, DerivesMissingFields)
{
    const auto back = parse_dataset_json(
        R"({"addresses":[{"address":"bc1qar0srrr7xfkvy5l643lydnw9re59gtzzwf5mdq","family":"conti"}]})",
        CategoryRegistry({"Conti"}));
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].address.category, ActorCategory::RaaS);
    EXPECT_EQ(back[0].address.script_type, ScriptType::P2WPKH);
    EXPECT_THROW(parse_dataset_json(R"({"addresses":[{"address":"x","family":""}]})", {}), Error);
    EXPECT_THROW(parse_dataset_json(R"({"addr":[]})", {}), Error);
    EXPECT_THROW(parse_dataset_json(R"({"addresses":[{"address":"x","family":"f","balance_sat":-1}]})", {}), Error);
}

TEST(FixtureChain, RoundTrip)
{
    const auto chain = fixture::random_ledger_chain(11, 10, 60);
    const auto text = write_fixture_chain(chain.txs);
    EXPECT_EQ(parse_fixture_chain(text), chain.txs);
    EXPECT_EQ(tx_from_json(tx_to_json(chain.txs[5])), chain.txs[5]);
}

TEST(Exclusions, Parse)
{
    const auto ex = parse_exclusions(R"({"exclusions":[{"address":"1abc","reason":"seized-silkroad"}]})");
    EXPECT_EQ(ex.reason("1abc"), "seized-silkroad");
    EXPECT_FALSE(ex.reason("1abd"));
    EXPECT_THROW(parse_exclusions("[]"), Error);
}

TEST(Store, EventsAppendOnlyAndDeduplicated)
{
    test::TempDir dir;
    LedgerEvent e;
    e.address = "1A";
    e.txid = test::txid(1);
    e.btc = SatoshiAmount(5);
    e.usd = UsdCents(250);
    e.timestamp = 10;
    e.output_index = 0;
    auto t = e;
    t.direction = Direction::Transfer;
    t.output_index = -1;
    t.timestamp = 20;
    {
        Store s((dir / "db.sqlite").string());
        EXPECT_EQ(s.append_events({e, t}), 2u);
        EXPECT_EQ(s.append_events({e}), 0u);
    }
    Store s((dir / "db.sqlite").string());
    EXPECT_EQ(s.events_for("1A"), (std::vector<LedgerEvent>{e, t}));
    EXPECT_EQ(s.all_events().size(), 1u);
}

TEST(Store, DatasetTxsCheckpointsReports)
{
    Store s(":memory:");
    auto d = entry("1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa", "Locky", 5, 10, 3);
    d.address.excluded = "no-payment";
    s.upsert_dataset_entry(d);
    EXPECT_EQ(s.dataset_entry(d.address.encoded), d);
    d.balance = SatoshiAmount(1);
    s.upsert_dataset_entry(d);
    EXPECT_EQ(s.dataset().size(), 1u);
    EXPECT_EQ(s.dataset()[0].balance.sat(), 1u);

    const auto chain = fixture::random_ledger_chain(4, 5, 20);
    s.put_txs(chain.txs);
    s.put_txs(chain.txs);
    auto stored = s.all_txs();
    EXPECT_EQ(stored.size(), chain.txs.size());

    IngestCheckpoint cp{"1A", test::txid(3), 99, 4};
    s.put_checkpoint(cp);
    EXPECT_EQ(s.checkpoint("1A"), cp);
    EXPECT_FALSE(s.checkpoint("1B"));

    s.put_report_json("R000001", "{}");
    s.put_report_json("R000001", "{\"a\":1}");
    EXPECT_EQ(s.all_report_json(), std::vector<std::string>{"{\"a\":1}"});
}
