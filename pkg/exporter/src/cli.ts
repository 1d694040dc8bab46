#!/usr/bin/env node
/**
 * depthedge-export: convert checkpoints to LDWB bundles and batch teacher
 * networks into proxy-label maps.
 *
 *   export  --checkpoint model.safetensors --map MAP.json --out W.ldwb
 *   distill --images DIR --teacher-cmd "CMD {in} {out}" --out DIR
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { exportCheckpoint, loadNameMap } from "./convert";
import { distillProxyLabels } from "./distill";

function main(): void {
  yargs(hideBin(process.argv))
    .scriptName("depthedge-export")
    .command(
      "export",
      "convert a checkpoint into an LDWB weight bundle",
      (y) =>
        y
          .option("checkpoint", { type: "string", demandOption: true })
          .option("map", {
            type: "string",
            demandOption: true,
            describe: "JSON object: bundle key -> checkpoint tensor name",
          })
          .option("out", { type: "string", demandOption: true }),
      (argv) => {
        const summary = exportCheckpoint(
          argv.checkpoint,
          loadNameMap(argv.map),
          argv.out
        );
        for (const t of summary.tensors) {
          console.log(`${t.name}  [${t.dims.join(", ")}]`);
        }
        console.log(`wrote ${argv.out} (${summary.bytesWritten} bytes, ${summary.tensors.length} tensors)`);
      }
    )
    .command(
      "distill",
      "run a teacher command over an image folder, writing normalized LDRF proxies",
      (y) =>
        y
          .option("images", { type: "string", demandOption: true })
          .option("teacher-cmd", {
            type: "string",
            demandOption: true,
            describe: "shell template with {in} and {out} placeholders",
          })
          .option("out", { type: "string", demandOption: true }),
      (argv) => {
        const n = distillProxyLabels(argv.images, argv["teacher-cmd"], argv.out);
        console.log(`wrote ${n} proxy map(s) to ${argv.out}`);
      }
    )
    .demandCommand(1)
    .strict()
    .fail((msg, err) => {
      console.error(`error: ${err ? err.message : msg}`);
      process.exit(err ? 2 : 1);
    })
    .parse();
}

main();
