#pragma once

// Source text of the case-study libraries shipped under models/.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace ifsynth::bundled {

inline std::string intstack()
{
    return R"(// Integer stack of capacity 2 holding values in [0..3].
module IntStack:
  var top : [0..2]
  var el0, el1 : [0..3]
init: err=0 & top=0
function push(sd : [0..3]) {
  s=0 & top=2 ==> err'=1 & s'=1;
  s=0 & top=0 ==> el0'=sd & top'=1 & s'=1;
  s=0 & top=1 ==> el1'=sd & top'=2 & s'=1;
}
function pop() {
  s=0 & top=0 ==> err'=1 & s'=1;
  s=0 & top=1 ==> top'=0 & s'=1;
  s=0 & top=2 ==> top'=1 & s'=1;
}
endmodule
)";
}

// Cursor over a header of 2^h cells followed by 2^d data cells.
inline std::string datastream(unsigned h, unsigned d)
{
    if (h > d || d > 20)
        throw std::invalid_argument("datastream needs h <= d <= 20");
    const auto hmax = std::to_string((std::uint64_t{1} << h) - 1);
    const auto dmax = std::to_string((std::uint64_t{1} << d) - 1);
    return "// Data stream with a 2^" + std::to_string(h) + " header and 2^" + std::to_string(d) + " data cells.\n"
        "module DataStream:\n"
        "  var ptr : [0.." + dmax + "]\n"
        "  var isHeader : bool\n"
        "init: err=0 & isHeader=0\n"
        "function FirstHeader() {\n"
        "  s=0 ==> ptr'=0 & isHeader'=1 & s'=1;\n"
        "}\n"
        "function FirstData() {\n"
        "  s=0 ==> ptr'=0 & isHeader'=0 & s'=1;\n"
        "}\n"
        "function Next() {\n"
        "  s=0 & isHeader & ptr<" + hmax + " ==> ptr'=ptr+1 & s'=1;\n"
        "  s=0 & isHeader & ptr>=" + hmax + " ==> ptr'=0 & s'=1;\n"
        "  s=0 & isHeader=0 & ptr<" + dmax + " ==> ptr'=ptr+1 & s'=1;\n"
        "  s=0 & isHeader=0 & ptr=" + dmax + " ==> ptr'=0 & s'=1;\n"
        "}\n"
        "function Write() {\n"
        "  s=0 & isHeader ==> err'=1 & s'=1;\n"
        "  s=0 & isHeader=0 ==> s'=1;\n"
        "}\n"
        "endmodule\n";
}

// Cursor over 2^k bits with a validity flag.
inline std::string bitarray(unsigned k)
{
    if (k == 0 || k > 20)
        throw std::invalid_argument("bitarray needs 1 <= k <= 20");
    const auto max = std::to_string((std::uint64_t{1} << k) - 1);
    return "// Bit array manipulator over 2^" + std::to_string(k) + " bits.\n"
        "module BitArray:\n"
        "  var ptr : [0.." + max + "]\n"
        "  var valid : bool\n"
        "init: err=0 & valid=0\n"
        "function next() {\n"
        "  s=0 & ptr<" + max + " ==> ptr'=ptr+1 & valid'=1 & s'=1;\n"
        "  s=0 & ptr=" + max + " ==> ptr'=0 & valid'=1 & s'=1;\n"
        "}\n"
        "function prev() {\n"
        "  s=0 & ptr>0 ==> ptr'=ptr-1 & valid'=1 & s'=1;\n"
        "  s=0 & ptr=0 ==> ptr'=" + max + " & valid'=1 & s'=1;\n"
        "}\n"
        "function access() {\n"
        "  s=0 ==> valid'=0 & s'=1;\n"
        "}\n"
        "function modify() {\n"
        "  s=0 & valid=0 ==> err'=1 & s'=1;\n"
        "  s=0 & valid ==> valid'=0 & s'=1;\n"
        "}\n"
        "endmodule\n";
}

// Recursive Fibonacci over an explicit activation stack of 16 cells.
inline std::string fibonacci()
{
    constexpr int cells = 16;
    std::string out =
        "// Recursive Fibonacci with an explicit integer stack. Stack operations\n"
        "// jump back to nextpc when done; v carries the pushed or popped value.\n"
        "module Fibonacci:\n"
        "  var top : [0.." + std::to_string(cells) + "]\n";
    out += "  var ";
    for (int k = 0; k < cells; ++k)
        out += (k ? ", a" : "a") + std::to_string(k);
    out += " : [0..31]\n"
        "  var v : [0..31]\n"
        "  var nextpc : [0..31]\n"
        "init: err=0 & top=0\n";

    auto store = [&](const std::string& at, const std::string& then) {
        std::string r;
        for (int k = 0; k < cells; ++k)
            r += "  s=" + at + " & i=" + std::to_string(k) + " ==> a" + std::to_string(k) + "'=v & s'=" + then + ";\n";
        return r;
    };
    auto load = [&](const std::string& at, const std::string& then) {
        std::string r;
        for (int k = 0; k < cells; ++k)
            r += "  s=" + at + " & i=" + std::to_string(k) + " ==> v'=a" + std::to_string(k) + " & s'=" + then + ";\n";
        return r;
    };
    const auto full = std::to_string(cells);

    out += "function push() {\n"
        "  local var i : [0.." + full + "]\n"
        "  s=0 & top<" + full + " ==> i'=top & top'=top+1 & s'=1;\n";
    out += store("1", "2");
    out += "}\n";

    out += "function pop() {\n"
        "  local var i : [0.." + full + "]\n"
        "  s=0 & top>0 ==> i'=top-1 & top'=top-1 & s'=1;\n";
    out += load("1", "2");
    out += "}\n";

    out += "function fib(n : [0..20]) {\n"
        "  local var res, tmp1, tmp2 : [0..31]\n"
        "  local var i : [0.." + full + "]\n"
        "  local var depth : [0..20]\n"
        "  s=0 & n<3 ==> res'=1 & s'=11;\n"
        "  s=0 & n>=3 ==> s'=2;\n"
        "  s=2 ==> nextpc'=3 & s'=15 & v'=5;\n"
        "  s=3 ==> nextpc'=4 & s'=15 & v'=n;\n"
        "  s=4 ==> n'=n-1 & depth'=depth+1 & s'=0;\n"
        "  s=5 ==> tmp1'=res & s'=6;\n"
        "  s=6 ==> nextpc'=21 & s'=15 & v'=tmp1;\n"
        "  s=21 ==> nextpc'=7 & s'=15 & v'=9;\n"
        "  s=7 ==> nextpc'=8 & s'=15 & v'=n;\n"
        "  s=8 ==> n'=n-2 & depth'=depth+1 & s'=0;\n"
        "  s=9 ==> tmp2'=res & nextpc'=22 & s'=17;\n"
        "  s=22 ==> tmp1'=v & s'=10;\n"
        "  s=10 ==> res'=tmp1+tmp2 & s'=11;\n"
        "  s=11 & depth=0 ==> s'=24;\n"
        "  s=11 & depth>0 ==> nextpc'=12 & s'=17;\n"
        "  s=12 ==> n'=v & s'=13;\n"
        "  s=13 ==> nextpc'=14 & s'=17;\n"
        "  s=14 ==> s'=v & depth'=depth-1;\n"
        "  // inlined push of v\n"
        "  s=15 & top<" + full + " ==> i'=top & top'=top+1 & s'=16;\n";
    out += store("16", "nextpc");
    out += "  // inlined pop into v\n"
        "  s=17 & top>0 ==> i'=top-1 & top'=top-1 & s'=18;\n";
    out += load("18", "nextpc");
    out += "}\n"
        "endmodule\n";
    return out;
}

inline std::string empty()
{
    return "// A library without functions.\n"
        "module Empty:\n"
        "init: err=0\n"
        "endmodule\n";
}

// File name under models/ -> source text.
inline std::map<std::string, std::string> all()
{
    return {
        {"intstack.gu", intstack()},
        {"datastream_h2_d4.gu", datastream(2, 4)},
        {"datastream_h2_d6.gu", datastream(2, 6)},
        {"datastream_h3_d6.gu", datastream(3, 6)},
        {"datastream_h2_d12.gu", datastream(2, 12)},
        {"bitarray_k4.gu", bitarray(4)},
        {"bitarray_k6.gu", bitarray(6)},
        {"bitarray_k8.gu", bitarray(8)},
        {"fibonacci.gu", fibonacci()},
        {"empty.gu", empty()},
    };
}

} // namespace ifsynth::bundled
