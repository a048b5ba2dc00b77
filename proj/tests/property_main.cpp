// Standalone runner for the structural properties of the link-pattern and
// transfer-matrix layers. Shares its test cases with the unit suite.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

int main(int argc, char** argv) {
  doctest::Context ctx;
  ctx.setOption("test-case",
                "transfer matrix is self-adjoint for the bilinear form,"
                "transfer matrix commutes with translation and parity,"
                "two evaluations of the partition function agree,"
                "bilinear form on the worked examples,"
                "bilinear form is symmetric and positive on single patterns,"
                "pattern counts agree with chord enumeration,"
                "encode and decode round-trip on every small pattern,"
                "encode is injective on random labelled patterns,"
                "translation and parity");
  ctx.applyCommandLine(argc, argv);
  return ctx.run();
}
