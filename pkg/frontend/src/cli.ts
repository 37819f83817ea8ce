#!/usr/bin/env node
import { readFileSync } from "node:fs";
import { hideBin } from "yargs/helpers";
import yargs from "yargs";

import { render } from "./render.js";
import { figureSpecSchema } from "./types.js";

async function main(): Promise<void> {
  const argv = await yargs(hideBin(process.argv))
    .option("spec", {
      type: "string",
      demandOption: true,
      describe: "JSON figure spec: {kind, input, output, aggregation}",
    })
    .strict()
    .parse();

  const raw = JSON.parse(readFileSync(argv.spec, "utf8"));
  const spec = figureSpecSchema.parse(raw);
  const out = render(spec);
  process.stdout.write(`${out.imagePath}\n${out.sidecarPath}\n`);
}

main().catch((err: unknown) => {
  const msg = err instanceof Error ? `${err.name}: ${err.message}` : String(err);
  process.stderr.write(msg + "\n");
  process.exit(1);
});
