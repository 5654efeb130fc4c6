import yargs from "yargs";
import { ImageFormat } from "./figure.js";
import { render } from "./render.js";
import { RunDirError, SchemaError } from "./schema.js";

// === command line ==========================================================
// exit 0: rendered; exit 2: unusable input (bad directory, schema mismatch,
// bad arguments). Missing series are listed on stderr but are not fatal.

export function main(argv: string[]): number {
  let exitCode = 0;
  const parser = yargs(argv)
    .scriptName("wavecorr-figures")
    .usage("$0 render <run_dir> [--format png|svg]")
    .command(
      "render <run_dir>",
      "render one figure per data series of a persisted run",
      (y) =>
        y
          .positional("run_dir", { type: "string", demandOption: true })
          .option("format", { choices: ["png", "svg"] as const, default: "svg" as ImageFormat }),
      (args) => {
        try {
          const result = render(args.run_dir as string, { format: args.format });
          for (const name of result.missing) {
            process.stderr.write(`warning: missing series ${name}: listed in summary.json but CSV absent\n`);
          }
          for (const image of result.images) {
            process.stdout.write(`${image}\n`);
          }
          process.stdout.write(`rendered ${result.images.length} figure(s)\n`);
        } catch (err) {
          if (err instanceof RunDirError || err instanceof SchemaError) {
            process.stderr.write(`error: ${err.message}\n`);
            exitCode = 2;
          } else {
            throw err;
          }
        }
      }
    )
    .demandCommand(1, "a command is required")
    .strict()
    .fail((msg, err) => {
      if (err) throw err;
      process.stderr.write(`error: ${msg}\n`);
      process.stderr.write("usage: wavecorr-figures render <run_dir> [--format png|svg]\n");
      exitCode = 2;
    })
    .exitProcess(false)
    .help();
  parser.parseSync();
  return exitCode;
}
