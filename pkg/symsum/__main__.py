from symsum.symsum import run

run()
