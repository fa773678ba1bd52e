#include "codec_vectors.hpp"
#include "test_util.hpp"

#include <ransomtrace/address_codec.hpp>
#include <ransomtrace/fixture_gen.hpp>

#include <gtest/gtest.h>

using namespace ransomtrace;
using namespace ransomtrace::codec;

namespace {

Errc decode_error(std::string_view s, DecodedAddress (*fn)(std::string_view))
{
    try {
        fn(s);
    } catch (const CodecError& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected a CodecError for " << s;
    return Errc::InvalidCharacter;
}

} // namespace

TEST(Base58, RawVectors)
{
    for (const auto& v : vectors::kBase58Raw) {
        const auto bytes = test::unhex(v.hex);
        EXPECT_EQ(base58_encode(bytes), v.encoded) << v.hex;
        EXPECT_EQ(base58_decode(v.encoded), bytes) << v.encoded;
    }
}

TEST(Base58, RejectsCharactersOutsideAlphabet)
{
    for (const char* s : {"0", "O", "I", "l", "abc+", "3J98t1WpEZ73CNmQviecrnyiWrnqRhWNL0"})
        EXPECT_EQ(decode_error(s, decode_base58check), Errc::InvalidCharacter) << s;
}

TEST(Base58Check, MainnetVectors)
{
    for (const auto& v : vectors::kBase58Check) {
        const auto d = decode_base58check(v.address);
        EXPECT_EQ(d.version, v.version) << v.address;
        EXPECT_EQ(test::hex(d.payload), v.payload_hex) << v.address;
        EXPECT_EQ(d.script_type, v.version == 0 ? ScriptType::P2PKH : ScriptType::P2SH);
        EXPECT_EQ(base58check_encode(v.version, test::unhex(v.payload_hex)), v.address);
        EXPECT_EQ(encode(d), v.address);
        EXPECT_EQ(classify(v.address), d.script_type);
    }
}

TEST(Base58Check, OtherVersionIsUnknownVersion)
{
    for (const auto& v : vectors::kBase58CheckOtherVersion) {
        EXPECT_EQ(decode_error(v.address, decode_base58check), Errc::UnknownVersion);
        EXPECT_EQ(classify(v.address), ScriptType::Unknown);
    }
}

TEST(Base58Check, ChecksumAndLength)
{
    // Last character flipped: same length, wrong checksum.
    EXPECT_EQ(decode_error("1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNb", decode_base58check), Errc::BadChecksum);
    EXPECT_EQ(decode_error("", decode_base58check), Errc::BadLength);
    EXPECT_EQ(decode_error("1111", decode_base58check), Errc::BadLength);
    // Valid checksum over a 10-byte body.
    const std::vector<std::uint8_t> short_payload(9, 0x42);
    EXPECT_EQ(decode_error(base58check_encode(0x00, short_payload), decode_base58check), Errc::BadLength);
}

TEST(Bech32, ValidVectors)
{
    for (const auto& v : vectors::kBech32Valid) {
        const auto d = decode_bech32(v.address);
        EXPECT_EQ(d.version, v.witness_version) << v.address;
        EXPECT_EQ(d.hrp, "bc");
        EXPECT_EQ(test::hex(d.payload), v.program_hex) << v.address;
        EXPECT_EQ(d.script_type, d.payload.size() == 20 ? ScriptType::P2WPKH : ScriptType::P2WSH);
        EXPECT_EQ(encode(d), test::lower(v.address));
        EXPECT_EQ(encode_segwit("bc", 0, test::unhex(v.program_hex)), test::lower(v.address));
        EXPECT_EQ(classify(v.address), d.script_type);
    }
}

TEST(Bech32, InvalidVectorsRejected)
{
    for (const char* a : vectors::kBech32Invalid) {
        EXPECT_THROW(decode_bech32(a), CodecError) << a;
        EXPECT_EQ(classify(a), ScriptType::Unknown) << a;
    }
}

TEST(Bech32, SpecificErrors)
{
    EXPECT_EQ(decode_error("tb1qw508d6qejxtdg4y5r3zarvary0c5xw7kxpjzsx", decode_bech32), Errc::UnknownHrp);
    EXPECT_EQ(decode_error("bc1qw508d6qejxtdg4y5r3zarvary0c5xw7kv8f3t5", decode_bech32), Errc::BadChecksum);
    EXPECT_EQ(decode_error("bc1Qw508d6qejxtdg4y5r3zarvary0c5xw7kv8f3t4", decode_bech32), Errc::MixedCase);
    EXPECT_EQ(decode_error("bc1qw508d6qejxtdg4y5r3zarvary0c5xw7kv8f3tb", decode_bech32), Errc::InvalidCharacter);
    // 16-byte v0 program with a valid checksum.
    const std::vector<std::uint8_t> prog16(16, 7);
    EXPECT_EQ(decode_error(encode_segwit("bc", 0, prog16), decode_bech32), Errc::BadProgramLength);
}

TEST(Bech32, TaprootIsUnsupportedWitnessVersion)
{
    // Witness v1 with a bech32m checksum.
    const char* taproot = "bc1p0xlxvlhemja6c4dqv22uapctqupfhlxm9h8z3k2e72q4k9hcz7vqzk5jj0";
    EXPECT_EQ(decode_error(taproot, decode_bech32), Errc::UnsupportedWitnessVersion);
    EXPECT_EQ(classify(taproot), ScriptType::Unknown);
}

TEST(Classify, GarbageIsUnknown)
{
    for (const char* s : {"", "xyz", "bc1", "1", "3", "bc1q", "BC1QW508D6QEJXTDG4Y5R3ZARVARY0C5XW7KV8F3T"})
        EXPECT_EQ(classify(s), ScriptType::Unknown) << s;
}

TEST(Codec, RoundTripAndPrefixConsistency)
{
    fixture::Rng rng(99);
    for (int i = 0; i < 2000; ++i) {
        const auto a = fixture::random_address(rng);
        const auto type = classify(a);
        ASSERT_NE(type, ScriptType::Unknown) << a;
        const auto d = type == ScriptType::P2PKH || type == ScriptType::P2SH ? decode_base58check(a) : decode_bech32(a);
        EXPECT_EQ(encode(d), a);
        switch (type) {
        case ScriptType::P2PKH: EXPECT_EQ(a[0], '1'); break;
        case ScriptType::P2SH: EXPECT_EQ(a[0], '3'); break;
        case ScriptType::P2WPKH: EXPECT_EQ(a.size(), 42u); EXPECT_EQ(a.rfind("bc1q", 0), 0u); break;
        case ScriptType::P2WSH: EXPECT_EQ(a.size(), 62u); EXPECT_EQ(a.rfind("bc1q", 0), 0u); break;
        case ScriptType::Unknown: break;
        }
    }
}

TEST(Codec, FuzzedCorruptionsNeverAccepted)
{
    fixture::Rng rng(2024);
    std::vector<std::string> valid;
    for (const auto& v : vectors::kBase58Check) valid.emplace_back(v.address);
    for (const auto& v : vectors::kBech32Valid) valid.push_back(test::lower(v.address));
    for (int i = 0; i < 40; ++i) valid.push_back(fixture::random_address(rng));

    int false_accepts = 0;
    for (int i = 0; i < 10'000; ++i) {
        const auto& original = valid[i % valid.size()];
        const auto bad = test::corrupt(original, rng);
        if (classify(bad) != ScriptType::Unknown) {
            ++false_accepts;
            ADD_FAILURE() << original << " -> " << bad << " accepted";
        }
    }
    EXPECT_EQ(false_accepts, 0);
}
