#pragma once
// Generated by tests/oracle/codec_vectors.py. Do not edit.

#include <cstdint>

namespace vectors {

struct Raw { const char* hex; const char* encoded; };
struct Check { const char* address; std::uint8_t version; const char* payload_hex; };
struct Segwit { const char* address; int witness_version; const char* program_hex; };

inline constexpr Raw kBase58Raw[] = {
    {"", ""},
    {"61", "2g"},
    {"626262", "a3gV"},
    {"636363", "aPEr"},
    {"73696d706c792061206c6f6e6720737472696e67", "2cFupjhnEsSn59qHXstmK2ffpLv2"},
    {"00eb15231dfceb60925886b67d065299925915aeb172c06647", "1NS17iag9jJgTHD1VXjvLCEnZuQ3rJDE9L"},
    {"516b6fcd0f", "ABnLTmg"},
    {"bf4f89001e670274dd", "3SEo3LWLoPntC"},
    {"572e4794", "3EFU7m"},
    {"ecac89cad93923c02321", "EJDM8drfXA6uyA"},
    {"10c8511e", "Rt5zm"},
    {"00000000000000000000", "1111111111"},
};

inline constexpr Check kBase58Check[] = {
    {"1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa", 0x00, "62e907b15cbf27d5425399ebf6f0fb50ebb88f18"},
    {"3J98t1WpEZ73CNmQviecrnyiWrnqRhWNLy", 0x05, "b472a266d0bd89c13706a4132ccfb16f7c3b9fcb"},
    {"1BvBMSEYstWetqTFn5Au4m4GFg7xJaNVN2", 0x00, "77bff20c60e522dfaa3350c39b030a5d004e839a"},
    {"3Ai1JZ8pdJb2ksieUV8FsxSNVJCpoPi8W6", 0x05, "62e907b15cbf27d5425399ebf6f0fb50ebb88f18"},
// generated base58check
    {"1111111111111111111114oLvT2", 0x00, "0000000000000000000000000000000000000000"},
    {"3E2z66SeCPgujY4j3oSGmoEbN2PbHyjDDd", 0x05, "87684bed02c32e71cefb945516d1085a8788e1e8"},
    {"3Hoy8xUg9uYuV6J5tF5BotssdhSf5tg8wt", 0x05, "b0d29941c50fea8381b1ea3017ea723d38c3cdcd"},
    {"39qrBWJA3uhph52ebkUnFdomSrgUsUiBEE", 0x05, "596c9e20c9eefa130450cd5529224bb73c7cea95"},
    {"3AnYiJSzV3Qrd3FpWiksdrRSWN2KcNrmWg", 0x05, "63c4e9c54b43acadd9e4aa8d05df2d39ff8da69b"},
    {"33WB37z3qctxVcvdPE2Ddmtv14BxU3EhWx", 0x05, "13e34891d0bd2340ced9e0519cea9e6d1fb2f243"},
    {"14j1B2Qi8sNESdNg8hUHb1942hggdRxEm7", 0x00, "28d9fdf5034b26617fb90d563f377b2274a784be"},
    {"3CtUidrT4knrEx8F1dZaW8G7BhLLx7t6Mi", 0x05, "7ad45387a0c227b3c7d05edfb81d47ca0c9599b6"},
};

// Valid Base58Check under a non-mainnet version byte (testnet P2PKH, 0x6f).
inline constexpr Check kBase58CheckOtherVersion[] = {
    {"mpe64VNfqogZfKz1J8ikUTbxQtg8uhvkKX", 0x6f, "641286d159bb6e7094a59db580efd056e4f8711b"},
    {"mnUzyZCTsYK6vmjNkwc7PWZ8E3mHbRtsZs", 0x6f, "4c6a495efa227aadde773f22fc4fd4a0cfd72133"},
};

inline constexpr Segwit kBech32Valid[] = {
    {"BC1QW508D6QEJXTDG4Y5R3ZARVARY0C5XW7KV8F3T4", 0, "751e76e8199196d454941c45d1b3a323f1433bd6"},
    {"bc1qw508d6qejxtdg4y5r3zarvary0c5xw7kv8f3t4", 0, "751e76e8199196d454941c45d1b3a323f1433bd6"},
    {"bc1qrp33g0q5c5txsp9arysrx4k6zdkfs4nce4xj0gdcccefvpysxf3qccfmv3", 0, "1863143c14c5166804bd19203356da136c985678cd4d27a1b8c6329604903262"},
    {"bc1qar0srrr7xfkvy5l643lydnw9re59gtzzwf5mdq", 0, "e8df018c7e326cc253faac7e46cdc51e68542c42"},
// generated bech32
    {"bc1qhqrmk69f3kucz32u0tqnxjws3jq4r5vv2wgm29", 0, "b807bb68a98db981455c7ac13349d08c8151d18c"},
    {"bc1qxufmnt7394zctuutxauqj2zv8u94509erhzpvymzqt6wmckqhf5qvf26z8", 0, "3713b9afd12d4585f38b377809284c3f0b5a3cb91dc416136202f4ede2c0ba68"},
    {"bc1qzdnmefv3v2nuzg6u4qguk0thpp6ugqarmw5tuv", 0, "1367bca59162a7c1235ca811cb3d770875c403a3"},
    {"bc1q4ef88ll6e2pfnwc57ccs2jkymlz93fn9r0vmml0v6f08swr5mm8qv7edrn", 0, "ae5273fffaca8299bb14f631054ac4dfc458a6651bd9bdfdecd25e783874dece"},
};

// Rejected by the oracle as mainnet segwit addresses.
inline constexpr const char* kBech32Invalid[] = {
    "tc1qw508d6qejxtdg4y5r3zarvary0c5xw7kg3g4ty",
    "bc1qw508d6qejxtdg4y5r3zarvary0c5xw7kv8f3t5",
    "BC13W508D6QEJXTDG4Y5R3ZARVARY0C5XW7KN40WF2",
    "bc1rw5uspcuh",
    "bc10w508d6qejxtdg4y5r3zarvary0c5xw7kw508d6qejxtdg4y5r3zarvary0c5xw7kw5rljs90",
    "BC1QR508D6QEJXTDG4Y5R3ZARVARY0C5XW7KN40WF2",
    "tb1qrp33g0q5c5txsp9arysrx4k6zdkfs4nce4xj0gdcccefvpysxf3q0sL5k7",
    "bc1zw508d6qejxtdg4y5r3zarvary0c5xw7kv8f3t4",
    "tb1qrp33g0q5c5txsp9arysrx4k6zdkfs4nce4xj0gdcccefvpysxf3pjxtptv",
    "bc1gmk9yu",
    "tb1qw508d6qejxtdg4y5r3zarvary0c5xw7kxpjzsx",
};

} // namespace vectors
