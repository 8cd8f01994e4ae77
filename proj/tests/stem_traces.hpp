#pragma once

#include <string_view>

#include "tetun/stemmer.hpp"

namespace tetun::golden {

struct StemTrace {
    std::string_view word;
    StemVariant variant;
    std::string_view expected;
    StemStep step;
};

// Worked by hand from the region definitions and the suffix chain. Region offsets
// are noted where they decide the outcome.
inline constexpr StemTrace stem_traces[] = {
    // r1=3 r2=5, general "asaun" at 7
    {"komunikasaun", StemVariant::light, "komunik", StemStep::general},
    // r1=3 r2=5, general "asaun" at 6
    {"selebrasaun", StemVariant::light, "selebr", StemStep::general},
    // r1=2 r2=4, general "imentu" at 7
    {"akontesimentu", StemVariant::light, "akontes", StemStep::general},
    // r1=3 r2=6, general "izmu" at 8
    {"nasionalizmu", StemVariant::light, "nasional", StemStep::general},
    // r1=3 r2=5, general "izmu" at 3 fails R2 and ends the chain
    {"turizmu", StemVariant::light, "turizmu", StemStep::blocked},
    // r1=2 r2=5, general "ante" at 5
    {"estudante", StemVariant::light, "estud", StemStep::general},
    // r1=3 r2=6, general "ável" at 7
    {"responsável", StemVariant::light, "respons", StemStep::general},
    // r1=3 r2=5, general "ozu" at 5
    {"perigozu", StemVariant::light, "perig", StemStep::general},
    // r1=3 r2=5, general "adór" at 7
    {"komunikadór", StemVariant::light, "komunik", StemStep::general},
    // r1=2 r2=6, lojia at 7 -> loj
    {"antropolojia", StemVariant::light, "antropoloj", StemStep::lojia},
    // r1=4 r2=6, lojia at 3 fails R2
    {"biolojia", StemVariant::light, "biolojia", StemStep::blocked},
    // r1=3 r2=7, usaun at 7 -> u
    {"konstitusaun", StemVariant::light, "konstitu", StemStep::usaun},
    // r1=2 r2=5, énsia at 8 -> ente
    {"independénsia", StemVariant::light, "independente", StemStep::ensia},
    // r1=3 r2=5, amente at 5 in R1, nothing further
    {"rapidamente", StemVariant::light, "rapid", StemStep::amente},
    // r1=3 r2=5, amente, then iv at 5 in R2, then at at 3 outside R2
    {"relativamente", StemVariant::light, "relat", StemStep::amente},
    // r1=3 r2=5, amente, then oz at 5 in R2
    {"perigozamente", StemVariant::light, "perig", StemStep::amente},
    // r1=2 r2=4, mente at 9, then ante at 5
    {"abundantemente", StemVariant::light, "abund", StemStep::mente},
    // r1=2 r2=4, idade at 6, nothing further
    {"universidade", StemVariant::light, "univers", StemStep::idade},
    // r1=3 r2=6, idade at 10, then abil at 7
    {"responsabilidade", StemVariant::light, "respons", StemStep::idade},
    // r1=3 r2=5, idade at 5
    {"kapasidade", StemVariant::light, "kapas", StemStep::idade},
    // r1=3 r2=5, iva at 9, then at at 7
    {"komunikativa", StemVariant::light, "komunik", StemStep::iva},
    // rv=3 (consonant-vowel start), verb adu at 7
    {"komunikadu", StemVariant::light, "komunik", StemStep::verb},
    // rv=3 (second letter consonant, next vowel at 2), verb adu at 7
    {"trabalhadu", StemVariant::light, "trabalh", StemStep::verb},
    // rv=3 (two leading vowels, next consonant at 2), verb adu at 6
    {"aumentadu", StemVariant::light, "aument", StemStep::verb},
    // rv=4 (second letter consonant, next vowel at 3), residual a at 5
    {"eskola", StemVariant::light, "eskol", StemStep::residual},
    // rv=4 (null: two leading vowels, no consonant), residual a at 3 fails RV
    {"aeia", StemVariant::light, "aeia", StemStep::blocked},
    // light chain finds nothing; native suffix dór leaves 4
    {"hemudór", StemVariant::moderate, "hemu", StemStep::native_suffix},
    {"hemudór", StemVariant::light, "hemudór", StemStep::unchanged},
    // longest native suffix is "-nain"
    {"serbisu-nain", StemVariant::moderate, "serbisu", StemStep::native_suffix},
    // "nain" leaves 0 characters, below the guard
    {"nain", StemVariant::moderate, "nain", StemStep::unchanged},
    {"liman", StemVariant::moderate, "lima", StemStep::native_suffix},
    // heavy strips the native prefix
    {"hadame", StemVariant::heavy, "dame", StemStep::native_prefix},
    {"nakfera", StemVariant::heavy, "fera", StemStep::native_prefix},
    // rv=3, residual a at 6
    {"nakfera", StemVariant::moderate, "nakfer", StemStep::residual},
    {"ba", StemVariant::heavy, "ba", StemStep::too_short},
    {"uma", StemVariant::moderate, "uma", StemStep::too_short},
};

}  // namespace tetun::golden
